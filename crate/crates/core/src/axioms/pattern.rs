//! First-order patterns over entities with numbered metavariables.

use crate::expr::{Constant, Entity, Rel, Statement};

pub(crate) const SLOTS: usize = 6;

#[derive(Clone, Debug)]
pub(crate) enum Pat {
    Meta(u8),
    Zero,
    One,
    Add(Box<Pat>, Box<Pat>),
    Mul(Box<Pat>, Box<Pat>),
    Neg(Box<Pat>),
    Inv(Box<Pat>),
    Sqr(Box<Pat>),
}

pub(crate) fn m(i: u8) -> Pat {
    Pat::Meta(i)
}

pub(crate) fn add(l: Pat, r: Pat) -> Pat {
    Pat::Add(Box::new(l), Box::new(r))
}

pub(crate) fn mul(l: Pat, r: Pat) -> Pat {
    Pat::Mul(Box::new(l), Box::new(r))
}

pub(crate) fn neg(c: Pat) -> Pat {
    Pat::Neg(Box::new(c))
}

pub(crate) fn inv(c: Pat) -> Pat {
    Pat::Inv(Box::new(c))
}

pub(crate) fn sqr(c: Pat) -> Pat {
    Pat::Sqr(Box::new(c))
}

/// Metavariable assignment produced by matching. Slots are zero-based, so
/// the pattern variable `x1` lives in slot 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Binding {
    slots: [Option<Entity>; SLOTS],
}

impl Binding {
    pub fn get(&self, slot: usize) -> Option<&Entity> {
        self.slots.get(slot).and_then(|s| s.as_ref())
    }

    pub(crate) fn set(&mut self, slot: u8, e: Entity) {
        self.slots[slot as usize] = Some(e);
    }

    pub fn bound(&self) -> impl Iterator<Item = (usize, &Entity)> {
        self.slots.iter().enumerate().filter_map(|(i, s)| s.as_ref().map(|e| (i, e)))
    }
}

impl Pat {
    pub(crate) fn matches(&self, e: &Entity, b: &mut Binding) -> bool {
        match (self, e) {
            (Pat::Meta(i), _) => match &b.slots[*i as usize] {
                Some(bound) => bound == e,
                None => {
                    b.slots[*i as usize] = Some(e.clone());
                    true
                }
            },
            (Pat::Zero, Entity::Const(Constant::Zero)) => true,
            (Pat::One, Entity::Const(Constant::One)) => true,
            (Pat::Add(pl, pr), Entity::Add(l, r)) | (Pat::Mul(pl, pr), Entity::Mul(l, r)) => {
                pl.matches(l, b) && pr.matches(r, b)
            }
            (Pat::Neg(p), Entity::Neg(c))
            | (Pat::Inv(p), Entity::Inv(c))
            | (Pat::Sqr(p), Entity::Sqr(c)) => p.matches(c, b),
            _ => false,
        }
    }

    pub(crate) fn build(&self, b: &Binding) -> Option<Entity> {
        Some(match self {
            Pat::Meta(i) => b.slots[*i as usize].clone()?,
            Pat::Zero => Entity::zero(),
            Pat::One => Entity::one(),
            Pat::Add(l, r) => Entity::add(l.build(b)?, r.build(b)?),
            Pat::Mul(l, r) => Entity::mul(l.build(b)?, r.build(b)?),
            Pat::Neg(c) => Entity::neg(c.build(b)?),
            Pat::Inv(c) => Entity::inv(c.build(b)?),
            Pat::Sqr(c) => Entity::sqr(c.build(b)?),
        })
    }

    pub(crate) fn metas(&self, out: &mut Vec<u8>) {
        match self {
            Pat::Meta(i) => {
                if !out.contains(i) {
                    out.push(*i);
                }
            }
            Pat::Zero | Pat::One => {}
            Pat::Add(l, r) | Pat::Mul(l, r) => {
                l.metas(out);
                r.metas(out);
            }
            Pat::Neg(c) | Pat::Inv(c) | Pat::Sqr(c) => c.metas(out),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct StmtPat {
    pub rel: Rel,
    pub lhs: Pat,
    pub rhs: Pat,
}

impl StmtPat {
    pub(crate) fn new(rel: Rel, lhs: Pat, rhs: Pat) -> Self {
        StmtPat { rel, lhs, rhs }
    }

    pub(crate) fn matches(&self, s: &Statement, b: &mut Binding) -> bool {
        self.rel == s.rel && self.lhs.matches(&s.lhs, b) && self.rhs.matches(&s.rhs, b)
    }

    pub(crate) fn build(&self, b: &Binding) -> Option<Statement> {
        Some(Statement::new(self.rel, self.lhs.build(b)?, self.rhs.build(b)?))
    }

    pub(crate) fn metas(&self, out: &mut Vec<u8>) {
        self.lhs.metas(out);
        self.rhs.metas(out);
    }
}
