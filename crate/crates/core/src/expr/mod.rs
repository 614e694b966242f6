//! Term algebra: entities, statements, canonical text form, positional
//! addressing and exact numeric evaluation.
//!
//! Entities are immutable trees with `Arc` children, so cloning and
//! position-local replacement share every untouched subtree.

mod eval;
mod parse;
pub(crate) mod path;

use std::fmt;
use std::sync::Arc;

pub use eval::{Assignment, EvalError};
pub use parse::{parse_entity, parse_statement, ParseError};
pub use path::{
    enumerate_nodes, enumerate_statement_nodes, NodePath, PathError, Side, StatementScope,
    StmtRef,
};

/// Default variable alphabet.
pub const DEFAULT_ALPHABET: [char; 5] = ['a', 'b', 'c', 'd', 'e'];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Zero,
    One,
}

/// A term of the ordered-field language.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entity {
    Var(char),
    Const(Constant),
    Add(Arc<Entity>, Arc<Entity>),
    Mul(Arc<Entity>, Arc<Entity>),
    Neg(Arc<Entity>),
    Inv(Arc<Entity>),
    Sqr(Arc<Entity>),
}

impl Entity {
    pub fn var(name: char) -> Self {
        Entity::Var(name)
    }

    pub fn zero() -> Self {
        Entity::Const(Constant::Zero)
    }

    pub fn one() -> Self {
        Entity::Const(Constant::One)
    }

    pub fn add(lhs: Entity, rhs: Entity) -> Self {
        Entity::Add(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn mul(lhs: Entity, rhs: Entity) -> Self {
        Entity::Mul(Arc::new(lhs), Arc::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(child: Entity) -> Self {
        Entity::Neg(Arc::new(child))
    }

    pub fn inv(child: Entity) -> Self {
        Entity::Inv(Arc::new(child))
    }

    pub fn sqr(child: Entity) -> Self {
        Entity::Sqr(Arc::new(child))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Entity::Var(_) | Entity::Const(_))
    }

    /// Number of operator constructors (add, mul, neg, inverse, square).
    pub fn degree(&self) -> usize {
        match self {
            Entity::Var(_) | Entity::Const(_) => 0,
            Entity::Add(l, r) | Entity::Mul(l, r) => 1 + l.degree() + r.degree(),
            Entity::Neg(c) | Entity::Inv(c) | Entity::Sqr(c) => 1 + c.degree(),
        }
    }

    /// Total number of subterms, this one included.
    pub fn size(&self) -> usize {
        match self {
            Entity::Var(_) | Entity::Const(_) => 1,
            Entity::Add(l, r) | Entity::Mul(l, r) => 1 + l.size() + r.size(),
            Entity::Neg(c) | Entity::Inv(c) | Entity::Sqr(c) => 1 + c.size(),
        }
    }

    pub fn child(&self, index: u8) -> Option<&Entity> {
        match (self, index) {
            (Entity::Add(l, _) | Entity::Mul(l, _), 0) => Some(l),
            (Entity::Add(_, r) | Entity::Mul(_, r), 1) => Some(r),
            (Entity::Neg(c) | Entity::Inv(c) | Entity::Sqr(c), 0) => Some(c),
            _ => None,
        }
    }

    pub fn arity(&self) -> u8 {
        match self {
            Entity::Var(_) | Entity::Const(_) => 0,
            Entity::Add(..) | Entity::Mul(..) => 2,
            Entity::Neg(_) | Entity::Inv(_) | Entity::Sqr(_) => 1,
        }
    }

    /// Copy of `self` with child `index` swapped for `new`; siblings are shared.
    pub fn with_child(&self, index: u8, new: Entity) -> Option<Entity> {
        let new = Arc::new(new);
        Some(match (self, index) {
            (Entity::Add(_, r), 0) => Entity::Add(new, r.clone()),
            (Entity::Add(l, _), 1) => Entity::Add(l.clone(), new),
            (Entity::Mul(_, r), 0) => Entity::Mul(new, r.clone()),
            (Entity::Mul(l, _), 1) => Entity::Mul(l.clone(), new),
            (Entity::Neg(_), 0) => Entity::Neg(new),
            (Entity::Inv(_), 0) => Entity::Inv(new),
            (Entity::Sqr(_), 0) => Entity::Sqr(new),
            _ => return None,
        })
    }

    /// Token used for this node in graph observations.
    pub fn label(&self) -> String {
        match self {
            Entity::Var(v) => v.to_string(),
            Entity::Const(Constant::Zero) => "0".into(),
            Entity::Const(Constant::One) => "1".into(),
            Entity::Add(..) => "+".into(),
            Entity::Mul(..) => "*".into(),
            Entity::Neg(_) => "-".into(),
            Entity::Inv(_) => "1/".into(),
            Entity::Sqr(_) => "^2".into(),
        }
    }

    /// Visits every subterm in pre-order.
    pub fn for_each_subterm<'a>(&'a self, f: &mut impl FnMut(&'a Entity)) {
        f(self);
        match self {
            Entity::Var(_) | Entity::Const(_) => {}
            Entity::Add(l, r) | Entity::Mul(l, r) => {
                l.for_each_subterm(f);
                r.for_each_subterm(f);
            }
            Entity::Neg(c) | Entity::Inv(c) | Entity::Sqr(c) => c.for_each_subterm(f),
        }
    }

    pub fn variables(&self) -> Vec<char> {
        let mut out = Vec::new();
        self.for_each_subterm(&mut |e| {
            if let Entity::Var(v) = e {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
        });
        out
    }
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::Var(v) => write!(f, "{v}"),
            Entity::Const(Constant::Zero) => f.write_str("0"),
            Entity::Const(Constant::One) => f.write_str("1"),
            Entity::Add(l, r) => write!(f, "({l}+{r})"),
            Entity::Mul(l, r) => write!(f, "({l}*{r})"),
            Entity::Neg(c) => write!(f, "(-{c})"),
            Entity::Inv(c) => write!(f, "(1/{c})"),
            Entity::Sqr(c) => write!(f, "({c}^2)"),
        }
    }
}

/// Relation symbol of a statement. `Neq` only occurs in nonzero side
/// conditions (`x!=0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Eq,
    Geq,
    Leq,
    Neq,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Geq => ">=",
            Rel::Leq => "<=",
            Rel::Neq => "!=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Statement {
    pub rel: Rel,
    pub lhs: Entity,
    pub rhs: Entity,
}

impl Statement {
    pub fn new(rel: Rel, lhs: Entity, rhs: Entity) -> Self {
        Statement { rel, lhs, rhs }
    }

    pub fn eq(lhs: Entity, rhs: Entity) -> Self {
        Statement::new(Rel::Eq, lhs, rhs)
    }

    pub fn geq(lhs: Entity, rhs: Entity) -> Self {
        Statement::new(Rel::Geq, lhs, rhs)
    }

    pub fn leq(lhs: Entity, rhs: Entity) -> Self {
        Statement::new(Rel::Leq, lhs, rhs)
    }

    pub fn nonzero(e: Entity) -> Self {
        Statement::new(Rel::Neq, e, Entity::zero())
    }

    pub fn side(&self, side: Side) -> &Entity {
        match side {
            Side::Lhs => &self.lhs,
            Side::Rhs => &self.rhs,
        }
    }

    /// Closed without reference to any facts: identical sides of a reflexive
    /// relation, or two distinct constants for `!=`.
    pub fn is_reflexive(&self) -> bool {
        match self.rel {
            Rel::Eq | Rel::Geq | Rel::Leq => self.lhs == self.rhs,
            Rel::Neq => matches!(
                (&self.lhs, &self.rhs),
                (Entity::Const(a), Entity::Const(b)) if a != b
            ),
        }
    }

    pub fn node_count(&self) -> usize {
        self.lhs.size() + self.rhs.size()
    }

    pub fn degree(&self) -> usize {
        self.lhs.degree() + self.rhs.degree()
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.lhs, self.rel.symbol(), self.rhs)
    }
}

impl std::str::FromStr for Entity {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_entity(s)
    }
}

impl std::str::FromStr for Statement {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_statement(s)
    }
}

macro_rules! serde_as_text {
    ($t:ty) => {
        impl serde::Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> serde::Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_as_text!(Entity);
serde_as_text!(Statement);
