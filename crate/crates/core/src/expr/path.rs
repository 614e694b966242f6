//! Positional addressing of statements and subterms inside a proof state.
//!
//! A [`NodePath`] names a statement (goal, premise or fact by index) and,
//! optionally, a side plus a child-index path into that side. A path with no
//! side addresses the statement itself (its relation node). The textual form
//! is `g0`, `p1.l`, `f2.r.0.1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Entity, Statement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StmtRef {
    Goal(usize),
    Premise(usize),
    Fact(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Lhs,
    Rhs,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePath {
    pub stmt: StmtRef,
    pub side: Option<Side>,
    pub path: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("no statement at {0:?}")]
    NoStatement(StmtRef),
    #[error("child index out of range in {0}")]
    OutOfRange(String),
    #[error("{0} addresses a statement, not a subterm")]
    NotAnEntity(String),
    #[error("malformed node path {0:?}")]
    Malformed(String),
}

impl NodePath {
    pub fn statement(stmt: StmtRef) -> Self {
        NodePath { stmt, side: None, path: Vec::new() }
    }

    pub fn node(stmt: StmtRef, side: Side, path: Vec<u8>) -> Self {
        NodePath { stmt, side: Some(side), path }
    }

    pub fn is_statement(&self) -> bool {
        self.side.is_none()
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stmt {
            StmtRef::Goal(i) => write!(f, "g{i}")?,
            StmtRef::Premise(i) => write!(f, "p{i}")?,
            StmtRef::Fact(i) => write!(f, "f{i}")?,
        }
        if let Some(side) = self.side {
            f.write_str(if side == Side::Lhs { ".l" } else { ".r" })?;
            for idx in &self.path {
                write!(f, ".{idx}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for NodePath {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PathError::Malformed(s.to_string());
        let mut parts = s.split('.');
        let head = parts.next().ok_or_else(bad)?;
        let (role, idx) = head.split_at(head.len().min(1));
        let idx: usize = idx.parse().map_err(|_| bad())?;
        let stmt = match role {
            "g" => StmtRef::Goal(idx),
            "p" => StmtRef::Premise(idx),
            "f" => StmtRef::Fact(idx),
            _ => return Err(bad()),
        };
        let side = match parts.next() {
            None => return Ok(NodePath::statement(stmt)),
            Some("l") => Side::Lhs,
            Some("r") => Side::Rhs,
            Some(_) => return Err(bad()),
        };
        let path = parts
            .map(|p| match p {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        Ok(NodePath::node(stmt, side, path))
    }
}

impl Serialize for NodePath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodePath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Anything holding goals, premises and facts in a fixed order.
pub trait StatementScope {
    fn goals(&self) -> &[Statement];
    fn premises(&self) -> &[Statement];
    fn facts(&self) -> &[Statement];

    fn statement(&self, r: StmtRef) -> Result<&Statement, PathError> {
        match r {
            StmtRef::Goal(i) => self.goals().get(i),
            StmtRef::Premise(i) => self.premises().get(i),
            StmtRef::Fact(i) => self.facts().get(i),
        }
        .ok_or(PathError::NoStatement(r))
    }

    fn resolve(&self, path: &NodePath) -> Result<&Entity, PathError> {
        let stmt = self.statement(path.stmt)?;
        let side = path.side.ok_or_else(|| PathError::NotAnEntity(path.to_string()))?;
        descend(stmt.side(side), &path.path).ok_or_else(|| PathError::OutOfRange(path.to_string()))
    }

    /// The addressed statement with the subterm at `path` replaced by `new`.
    fn replace(&self, path: &NodePath, new: Entity) -> Result<Statement, PathError> {
        let stmt = self.statement(path.stmt)?;
        let side = path.side.ok_or_else(|| PathError::NotAnEntity(path.to_string()))?;
        replace_in_statement(stmt, side, &path.path, new)
            .ok_or_else(|| PathError::OutOfRange(path.to_string()))
    }

    /// Locates the first statement structurally equal to `target`, searching
    /// premises then facts then goals.
    fn find_statement(&self, target: &Statement) -> Option<StmtRef> {
        if let Some(i) = self.premises().iter().position(|s| s == target) {
            return Some(StmtRef::Premise(i));
        }
        if let Some(i) = self.facts().iter().position(|s| s == target) {
            return Some(StmtRef::Fact(i));
        }
        self.goals().iter().position(|s| s == target).map(StmtRef::Goal)
    }

    /// First position (in enumeration order) holding an entity equal to `target`.
    fn find_entity(&self, target: &Entity) -> Option<NodePath> {
        enumerate_nodes(self).into_iter().find(|(_, e)| *e == target).map(|(p, _)| p)
    }
}

impl StatementScope for Statement {
    fn goals(&self) -> &[Statement] {
        std::slice::from_ref(self)
    }

    fn premises(&self) -> &[Statement] {
        &[]
    }

    fn facts(&self) -> &[Statement] {
        &[]
    }
}

pub(crate) fn descend<'a>(mut e: &'a Entity, path: &[u8]) -> Option<&'a Entity> {
    for &i in path {
        e = e.child(i)?;
    }
    Some(e)
}

pub(crate) fn replace_entity(e: &Entity, path: &[u8], new: Entity) -> Option<Entity> {
    match path.split_first() {
        None => Some(new),
        Some((&i, rest)) => {
            let child = e.child(i)?;
            let replaced = replace_entity(child, rest, new)?;
            e.with_child(i, replaced)
        }
    }
}

pub(crate) fn replace_in_statement(
    stmt: &Statement,
    side: Side,
    path: &[u8],
    new: Entity,
) -> Option<Statement> {
    let mut out = stmt.clone();
    match side {
        Side::Lhs => out.lhs = replace_entity(&stmt.lhs, path, new)?,
        Side::Rhs => out.rhs = replace_entity(&stmt.rhs, path, new)?,
    }
    Some(out)
}

fn walk<'a>(e: &'a Entity, path: &mut Vec<u8>, out: &mut Vec<(Vec<u8>, &'a Entity)>) {
    out.push((path.clone(), e));
    for i in 0..e.arity() {
        path.push(i);
        walk(e.child(i).expect("arity bounds child index"), path, out);
        path.pop();
    }
}

/// Pre-order subterms of one statement, lhs before rhs.
pub fn enumerate_statement_nodes(stmt: &Statement) -> Vec<(Side, Vec<u8>, &Entity)> {
    let mut out = Vec::with_capacity(stmt.node_count());
    for side in [Side::Lhs, Side::Rhs] {
        let mut nodes = Vec::new();
        walk(stmt.side(side), &mut Vec::new(), &mut nodes);
        out.extend(nodes.into_iter().map(|(p, e)| (side, p, e)));
    }
    out
}

/// Every subterm position in scope: goals, then premises, then facts.
pub fn enumerate_nodes<S: StatementScope + ?Sized>(scope: &S) -> Vec<(NodePath, &Entity)> {
    let mut out = Vec::new();
    let groups: [(&[Statement], fn(usize) -> StmtRef); 3] = [
        (scope.goals(), StmtRef::Goal),
        (scope.premises(), StmtRef::Premise),
        (scope.facts(), StmtRef::Fact),
    ];
    for (stmts, mk) in groups {
        for (i, stmt) in stmts.iter().enumerate() {
            for (side, path, e) in enumerate_statement_nodes(stmt) {
                out.push((NodePath::node(mk(i), side, path), e));
            }
        }
    }
    out
}
