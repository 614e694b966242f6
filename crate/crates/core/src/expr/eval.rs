use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Constant, Entity, Rel, Statement};

pub type Assignment = BTreeMap<char, BigRational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("variable {0} is unassigned")]
    UnassignedVariable(char),
}

impl Entity {
    /// Exact field evaluation.
    pub fn eval(&self, env: &Assignment) -> Result<BigRational, EvalError> {
        Ok(match self {
            Entity::Var(v) => env.get(v).cloned().ok_or(EvalError::UnassignedVariable(*v))?,
            Entity::Const(Constant::Zero) => BigRational::zero(),
            Entity::Const(Constant::One) => BigRational::one(),
            Entity::Add(l, r) => l.eval(env)? + r.eval(env)?,
            Entity::Mul(l, r) => l.eval(env)? * r.eval(env)?,
            Entity::Neg(c) => -c.eval(env)?,
            Entity::Inv(c) => {
                let x = c.eval(env)?;
                if x.is_zero() {
                    return Err(EvalError::DivisionByZero);
                }
                x.recip()
            }
            Entity::Sqr(c) => {
                let x = c.eval(env)?;
                &x * &x
            }
        })
    }
}

impl Statement {
    pub fn holds(&self, env: &Assignment) -> Result<bool, EvalError> {
        let l = self.lhs.eval(env)?;
        let r = self.rhs.eval(env)?;
        Ok(match self.rel {
            Rel::Eq => l == r,
            Rel::Geq => l >= r,
            Rel::Leq => l <= r,
            Rel::Neq => l != r,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_entity;
    use num_bigint::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn evaluates_examples() {
        let mut env = Assignment::new();
        env.insert('a', rat(3));
        assert_eq!(parse_entity("(a+0)").unwrap().eval(&env).unwrap(), rat(3));

        let mut env = Assignment::new();
        env.insert('a', rat(1));
        env.insert('b', rat(2));
        env.insert('c', rat(3));
        assert_eq!(parse_entity("(((a*c)*b)^2)").unwrap().eval(&env).unwrap(), rat(36));
    }

    #[test]
    fn reports_errors() {
        let mut env = Assignment::new();
        env.insert('a', rat(0));
        assert_eq!(parse_entity("(1/a)").unwrap().eval(&env), Err(EvalError::DivisionByZero));
        assert_eq!(
            parse_entity("(a+b)").unwrap().eval(&env),
            Err(EvalError::UnassignedVariable('b'))
        );
    }

    #[test]
    fn negation_and_inverse_are_exact() {
        let mut env = Assignment::new();
        env.insert('a', rat(3));
        let e = parse_entity("((1/a)*(-a))").unwrap();
        assert_eq!(e.eval(&env).unwrap(), rat(-1));
    }
}
