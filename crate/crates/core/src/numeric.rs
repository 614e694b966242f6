//! Exact-rational spot checks: sample assignments satisfying a theorem's
//! premises and test its goal.
//!
//! Equality premises are solved one variable at a time, assuming the
//! difference of the two sides is affine in that variable; the solution is
//! then checked exactly, so the assumption is never trusted. Other premises
//! are met by rejection.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::expr::{Assignment, EvalError, Rel, Statement, DEFAULT_ALPHABET};
use crate::kernel::Theorem;

/// Small rational `p/q` with `p` in `-9..=9` and `q` in `1..=5`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(-9..=9)), BigInt::from(rng.gen_range(1..=5)))
}

fn difference(s: &Statement, env: &Assignment) -> Result<BigRational, EvalError> {
    Ok(s.lhs.eval(env)? - s.rhs.eval(env)?)
}

/// Sets one free variable of `premise` so that both sides agree.
fn solve_equality<R: Rng + ?Sized>(
    premise: &Statement,
    env: &mut Assignment,
    fixed: &mut Vec<char>,
    rng: &mut R,
) -> bool {
    if matches!(difference(premise, env), Ok(d) if d.is_zero()) {
        return true;
    }
    let mut vars: Vec<char> = premise.lhs.variables();
    for v in premise.rhs.variables() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    vars.retain(|v| !fixed.contains(v));
    vars.shuffle(rng);
    for v in vars {
        let saved = env[&v].clone();
        env.insert(v, BigRational::zero());
        let f0 = difference(premise, env);
        env.insert(v, BigRational::from_integer(BigInt::from(1)));
        let f1 = difference(premise, env);
        if let (Ok(f0), Ok(f1)) = (f0, f1) {
            let slope = f1 - &f0;
            if !slope.is_zero() {
                env.insert(v, -f0 / slope);
                if matches!(difference(premise, env), Ok(d) if d.is_zero()) {
                    fixed.push(v);
                    return true;
                }
            }
        }
        env.insert(v, saved);
    }
    false
}

/// An assignment of every alphabet variable under which all `premises`
/// hold and `goal` evaluates without division by zero, or `None` after
/// `max_tries` attempts.
pub fn satisfying_assignment<R: Rng + ?Sized>(
    premises: &[Statement],
    goal: &Statement,
    rng: &mut R,
    max_tries: usize,
) -> Option<Assignment> {
    'outer: for _ in 0..max_tries {
        let mut env: Assignment = DEFAULT_ALPHABET.iter().map(|&v| (v, random_rational(rng))).collect();
        let mut fixed = Vec::new();
        for p in premises.iter().filter(|p| p.rel == Rel::Eq && !p.is_reflexive()) {
            if !solve_equality(p, &mut env, &mut fixed, rng) {
                continue 'outer;
            }
        }
        for p in premises {
            if p.holds(&env) != Ok(true) {
                continue 'outer;
            }
        }
        if goal.lhs.eval(&env).is_ok() && goal.rhs.eval(&env).is_ok() {
            return Some(env);
        }
    }
    None
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NumericReport {
    /// Assignments found that satisfy the premises.
    pub trials: usize,
    /// Of those, how many make the goal hold.
    pub holds: usize,
    /// Requested trials for which no satisfying assignment was found.
    pub unsatisfied: usize,
}

impl NumericReport {
    pub fn merge(&mut self, other: &NumericReport) {
        self.trials += other.trials;
        self.holds += other.holds;
        self.unsatisfied += other.unsatisfied;
    }
}

pub fn check_theorem<R: Rng + ?Sized>(theorem: &Theorem, trials: usize, rng: &mut R) -> NumericReport {
    let mut report = NumericReport::default();
    for _ in 0..trials {
        match satisfying_assignment(&theorem.premises, &theorem.goal, rng, 200) {
            Some(env) => {
                report.trials += 1;
                if theorem.goal.holds(&env) == Ok(true) {
                    report.holds += 1;
                }
            }
            None => report.unsatisfied += 1,
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_statement;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn st(s: &str) -> Statement {
        parse_statement(s).unwrap()
    }

    #[test]
    fn solves_affine_premises() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let premises = [st("a=(b*c)"), st("(d+e)=(c*c)"), st("b!=0"), st("a>=0")];
        for _ in 0..20 {
            let env = satisfying_assignment(&premises, &st("a=a"), &mut rng, 200).unwrap();
            for p in &premises {
                assert_eq!(p.holds(&env), Ok(true), "{p}");
            }
        }
    }

    #[test]
    fn detects_false_goals() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let good = Theorem::new(st("((a+b)*c)=((a*c)+(b*c))"), vec![]);
        assert_eq!(check_theorem(&good, 10, &mut rng).holds, 10);
        let bad = Theorem::new(st("(a+b)=(a*b)"), vec![]);
        assert!(check_theorem(&bad, 10, &mut rng).holds < 10);
        let conditional = Theorem::new(st("(a+c)>=(b+c)"), vec![st("a>=b")]);
        let r = check_theorem(&conditional, 10, &mut rng);
        assert_eq!((r.trials, r.holds), (10, 10));
    }

    #[test]
    fn avoids_division_by_zero_in_the_goal() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = Theorem::new(st("(a*(1/a))=1"), vec![st("a!=0")]);
        let r = check_theorem(&t, 20, &mut rng);
        assert_eq!(r.holds, 20);
    }
}
