//! The eighteen-axiom ordered-field calculus.
//!
//! Every axiom has up to two kinds of use:
//!
//! * a *rewrite* form (the eleven axioms with a transformation pattern): one
//!   node argument is rewritten `L -> R` (forward) or `R -> L` (reverse), and
//!   the instance is the equality `node = node'`;
//! * a *statement* form: one or two statement arguments are matched against
//!   the rule's assumption patterns, remaining node arguments fill sampled
//!   slots, and the conclusions are instantiated. These are the implications
//!   the generator's extension step chains together, so the same table drives
//!   both [`extend`] and the kernel.
//!
//! Argument signatures of the statement forms:
//!
//! | axiom | arguments | conclusion |
//! |-------|-----------|------------|
//! | AC   | `L=R`, n       | `(R+n)=(n+L)` |
//! | AA   | `L=R`, n1, n2  | `(R+(n1+n2))=((L+n1)+n2)` |
//! | AS   | `L=R`          | `0=(L+(-R))` |
//! | MC   | `L=R`, n       | `(R*n)=(n*L)` |
//! | MA   | `L=R`, n1, n2  | `(R*(n1*n2))=((L*n1)*n2)` |
//! | MS   | `L=R` (needs `L!=0`) | `1=(L*(1/R))` |
//! | AMLD | `L=R`, n1, n2  | `((n1+n2)*R)=((n1*L)+(n2*L))` |
//! | AMRD | `L=R`, n1, n2  | `(R*(n1+n2))=((L*n1)+(L*n2))` |
//! | SD   | `L=R`          | `(L*R)=(L^2)` |
//! | MO   | `L=R`          | `(L*1)=R` (forward) or `(1*L)=R` (reverse) |
//! | AZ   | `L=R`          | `(L+0)=R` (forward) or `(0+L)=R` (reverse) |
//! | POE  | `L=R`, `n1=n2` | `(L+n1)=(R+n2)` |
//! | EMT  | `(x+y)=R`      | `x=(R+(-y))` |
//! | SGEQZ| `L=R`          | `(L*R)>=0` |
//! | EIDI | `L=R`          | `L>=R`, `L<=R` |
//! | IMT  | `(x+y)>=R`     | `x>=(R+(-y))` |
//! | FPOI | `L>=R`, `n1>=n2` | `(L+n1)>=(R+n2)` |
//! | SPOI | `L>=R`, `n>=0` | `(L*n)>=(R*n)` |

mod pattern;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::expr::{Entity, Rel, Statement};
use pattern::{add, inv, m, mul, neg, sqr, Pat, StmtPat};

pub use pattern::Binding;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomId {
    AC,
    AA,
    AS,
    MC,
    MA,
    MS,
    AMLD,
    AMRD,
    SD,
    MO,
    AZ,
    POE,
    EMT,
    SGEQZ,
    EIDI,
    IMT,
    FPOI,
    SPOI,
}

impl AxiomId {
    pub const ALL: [AxiomId; 18] = [
        AxiomId::AC,
        AxiomId::AA,
        AxiomId::AS,
        AxiomId::MC,
        AxiomId::MA,
        AxiomId::MS,
        AxiomId::AMLD,
        AxiomId::AMRD,
        AxiomId::SD,
        AxiomId::MO,
        AxiomId::AZ,
        AxiomId::POE,
        AxiomId::EMT,
        AxiomId::SGEQZ,
        AxiomId::EIDI,
        AxiomId::IMT,
        AxiomId::FPOI,
        AxiomId::SPOI,
    ];

    pub const FIELD: [AxiomId; 13] = [
        AxiomId::AC,
        AxiomId::AA,
        AxiomId::AS,
        AxiomId::MC,
        AxiomId::MA,
        AxiomId::MS,
        AxiomId::AMLD,
        AxiomId::AMRD,
        AxiomId::SD,
        AxiomId::MO,
        AxiomId::AZ,
        AxiomId::POE,
        AxiomId::EMT,
    ];

    /// Position in [`AxiomId::ALL`]; also the tie-break order in search.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> &'static str {
        match self {
            AxiomId::AC => "AC",
            AxiomId::AA => "AA",
            AxiomId::AS => "AS",
            AxiomId::MC => "MC",
            AxiomId::MA => "MA",
            AxiomId::MS => "MS",
            AxiomId::AMLD => "AMLD",
            AxiomId::AMRD => "AMRD",
            AxiomId::SD => "SD",
            AxiomId::MO => "MO",
            AxiomId::AZ => "AZ",
            AxiomId::POE => "POE",
            AxiomId::EMT => "EMT",
            AxiomId::SGEQZ => "SGEQZ",
            AxiomId::EIDI => "EIDI",
            AxiomId::IMT => "IMT",
            AxiomId::FPOI => "FPOI",
            AxiomId::SPOI => "SPOI",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::AC => "AdditionCommutativity",
            AxiomId::AA => "AdditionAssociativity",
            AxiomId::AS => "AdditionSimplification",
            AxiomId::MC => "MultiplicationCommutativity",
            AxiomId::MA => "MultiplicationAssociativity",
            AxiomId::MS => "MultiplicationSimplification",
            AxiomId::AMLD => "AdditionMultiplicationLeftDistribution",
            AxiomId::AMRD => "AdditionMultiplicationRightDistribution",
            AxiomId::SD => "SquareDefinition",
            AxiomId::MO => "MultiplicationOne",
            AxiomId::AZ => "AdditionZero",
            AxiomId::POE => "PrincipleOfEquality",
            AxiomId::EMT => "EquMoveTerm",
            AxiomId::SGEQZ => "SquareGEQZero",
            AxiomId::EIDI => "EquivalenceImpliesDoubleInequality",
            AxiomId::IMT => "IneqMoveTerm",
            AxiomId::FPOI => "FirstPrincipleOfInequality",
            AxiomId::SPOI => "SecondPrincipleOfInequality",
        }
    }

    pub fn is_field(self) -> bool {
        self.index() < 13
    }

    pub fn spec(self) -> &'static AxiomSpec {
        &specs()[self.index()]
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown axiom code {0:?}")]
pub struct UnknownAxiom(pub String);

impl FromStr for AxiomId {
    type Err = UnknownAxiom;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        // "FPI" is accepted as a short alias.
        if s == "FPI" {
            return Ok(AxiomId::FPOI);
        }
        AxiomId::ALL
            .into_iter()
            .find(|a| a.code() == s || a.name() == s)
            .ok_or_else(|| UnknownAxiom(s.to_string()))
    }
}

impl Serialize for AxiomId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for AxiomId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which axiom table the generator samples from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomSet {
    Field,
    OrderedField,
}

impl AxiomSet {
    pub fn axioms(self) -> &'static [AxiomId] {
        match self {
            AxiomSet::Field => &AxiomId::FIELD,
            AxiomSet::OrderedField => &AxiomId::ALL,
        }
    }
}

impl FromStr for AxiomSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "field" => Ok(AxiomSet::Field),
            "ordered-field" | "ordered_field" => Ok(AxiomSet::OrderedField),
            _ => Err(format!("unknown axiom set {s:?} (expected field or ordered-field)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Reverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgRole {
    /// A subterm position to rewrite.
    NodeToRewrite,
    /// The relation node of a proven statement (or of a goal, backward).
    FactRoot,
    /// Any subterm position; its entity fills a sampled slot.
    SampledEntity,
}

/// Relation the core statement must have for the extension step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoreForm {
    Equality,
    Inequality,
    None,
}

#[derive(Clone, Debug)]
pub struct AxiomSpec {
    pub id: AxiomId,
    /// Largest number of arguments any form of the axiom consumes.
    pub arity: usize,
    /// Roles of the statement-form arguments, in order.
    pub argument_roles: Vec<ArgRole>,
    pub has_transformation: bool,
    pub extension_core_form: CoreForm,
    /// Reverse rewriting is fully determined by the rewritten node.
    pub bidirectional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Implication {
    pub assumptions: Vec<Statement>,
    pub conclusions: Vec<Statement>,
}

/// An axiom argument after path resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Entity(Entity),
    Statement(Statement),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AxiomError {
    #[error("{axiom} needs {expected} argument(s), got {got}")]
    ArityMismatch { axiom: AxiomId, expected: usize, got: usize },
    #[error("{axiom}: argument {index} has the wrong kind")]
    ArgumentKind { axiom: AxiomId, index: usize },
    #[error("{axiom}: argument does not match the axiom pattern")]
    PatternMismatch { axiom: AxiomId },
    #[error("{0} has no transformation rule")]
    NotATransformAxiom(AxiomId),
    #[error("{axiom}: core statement has the wrong form for extension")]
    CoreFormMismatch { axiom: AxiomId },
    #[error("{0}: empty node pool")]
    EmptyPool(AxiomId),
}

pub(crate) struct TransformRule {
    pub lhs: Pat,
    pub rhs: Pat,
    /// Side condition for the forward direction.
    pub side: Option<StmtPat>,
}

pub(crate) struct Rule {
    /// Matched against statement arguments, in order.
    pub arg_premises: Vec<StmtPat>,
    /// Extra assumptions not supplied as arguments.
    pub side_conditions: Vec<StmtPat>,
    /// Metas bound by trailing entity arguments.
    pub samples: Vec<u8>,
    pub conclusions: Vec<StmtPat>,
}

impl Rule {
    pub(crate) fn arity(&self) -> usize {
        self.arg_premises.len() + self.samples.len()
    }

    fn assumptions(&self, b: &Binding) -> Option<Vec<Statement>> {
        self.arg_premises.iter().chain(&self.side_conditions).map(|p| p.build(b)).collect()
    }

    fn conclusions(&self, b: &Binding) -> Option<Vec<Statement>> {
        self.conclusions.iter().map(|p| p.build(b)).collect()
    }
}

// Statement-rule meta slots.
const L: u8 = 0;
const R: u8 = 1;
const N1: u8 = 2;
const N2: u8 = 3;
const X: u8 = 4;
const Y: u8 = 5;

fn eq(l: Pat, r: Pat) -> StmtPat {
    StmtPat::new(Rel::Eq, l, r)
}

fn geq(l: Pat, r: Pat) -> StmtPat {
    StmtPat::new(Rel::Geq, l, r)
}

fn rule(arg_premises: Vec<StmtPat>, samples: Vec<u8>, conclusions: Vec<StmtPat>) -> Rule {
    Rule { arg_premises, side_conditions: Vec::new(), samples, conclusions }
}

fn transform_table() -> &'static [Vec<TransformRule>] {
    static TABLE: OnceLock<Vec<Vec<TransformRule>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let t = |lhs, rhs| TransformRule { lhs, rhs, side: None };
        AxiomId::ALL
            .iter()
            .map(|a| match a {
                AxiomId::AC => vec![t(add(m(0), m(1)), add(m(1), m(0)))],
                AxiomId::AA => vec![t(add(m(0), add(m(1), m(2))), add(add(m(0), m(1)), m(2)))],
                AxiomId::AS => vec![t(add(m(0), neg(m(0))), Pat::Zero)],
                AxiomId::MC => vec![t(mul(m(0), m(1)), mul(m(1), m(0)))],
                AxiomId::MA => vec![t(mul(m(0), mul(m(1), m(2))), mul(mul(m(0), m(1)), m(2)))],
                AxiomId::MS => vec![TransformRule {
                    lhs: mul(m(0), inv(m(0))),
                    rhs: Pat::One,
                    side: Some(StmtPat::new(Rel::Neq, m(0), Pat::Zero)),
                }],
                AxiomId::AMLD => vec![t(
                    mul(add(m(0), m(1)), m(2)),
                    add(mul(m(0), m(2)), mul(m(1), m(2))),
                )],
                AxiomId::AMRD => vec![t(
                    mul(m(0), add(m(1), m(2))),
                    add(mul(m(0), m(1)), mul(m(0), m(2))),
                )],
                AxiomId::SD => vec![t(sqr(m(0)), mul(m(0), m(0)))],
                AxiomId::MO => vec![t(mul(m(0), Pat::One), m(0)), t(mul(Pat::One, m(0)), m(0))],
                AxiomId::AZ => vec![t(add(m(0), Pat::Zero), m(0)), t(add(Pat::Zero, m(0)), m(0))],
                _ => Vec::new(),
            })
            .collect()
    })
}

pub(crate) fn rule_table() -> &'static [Vec<Rule>] {
    static TABLE: OnceLock<Vec<Vec<Rule>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let core = || eq(m(L), m(R));
        AxiomId::ALL
            .iter()
            .map(|a| match a {
                AxiomId::AC => vec![rule(vec![core()], vec![N1], vec![eq(add(m(R), m(N1)), add(m(N1), m(L)))])],
                AxiomId::AA => vec![rule(
                    vec![core()],
                    vec![N1, N2],
                    vec![eq(add(m(R), add(m(N1), m(N2))), add(add(m(L), m(N1)), m(N2)))],
                )],
                AxiomId::AS => vec![rule(vec![core()], vec![], vec![eq(Pat::Zero, add(m(L), neg(m(R))))])],
                AxiomId::MC => vec![rule(vec![core()], vec![N1], vec![eq(mul(m(R), m(N1)), mul(m(N1), m(L)))])],
                AxiomId::MA => vec![rule(
                    vec![core()],
                    vec![N1, N2],
                    vec![eq(mul(m(R), mul(m(N1), m(N2))), mul(mul(m(L), m(N1)), m(N2)))],
                )],
                AxiomId::MS => vec![Rule {
                    arg_premises: vec![core()],
                    side_conditions: vec![StmtPat::new(Rel::Neq, m(L), Pat::Zero)],
                    samples: vec![],
                    conclusions: vec![eq(Pat::One, mul(m(L), inv(m(R))))],
                }],
                AxiomId::AMLD => vec![rule(
                    vec![core()],
                    vec![N1, N2],
                    vec![eq(mul(add(m(N1), m(N2)), m(R)), add(mul(m(N1), m(L)), mul(m(N2), m(L))))],
                )],
                AxiomId::AMRD => vec![rule(
                    vec![core()],
                    vec![N1, N2],
                    vec![eq(mul(m(R), add(m(N1), m(N2))), add(mul(m(L), m(N1)), mul(m(L), m(N2))))],
                )],
                AxiomId::SD => vec![rule(vec![core()], vec![], vec![eq(mul(m(L), m(R)), sqr(m(L)))])],
                AxiomId::MO => vec![
                    rule(vec![core()], vec![], vec![eq(mul(m(L), Pat::One), m(R))]),
                    rule(vec![core()], vec![], vec![eq(mul(Pat::One, m(L)), m(R))]),
                ],
                AxiomId::AZ => vec![
                    rule(vec![core()], vec![], vec![eq(add(m(L), Pat::Zero), m(R))]),
                    rule(vec![core()], vec![], vec![eq(add(Pat::Zero, m(L)), m(R))]),
                ],
                AxiomId::POE => vec![rule(
                    vec![core(), eq(m(N1), m(N2))],
                    vec![],
                    vec![eq(add(m(L), m(N1)), add(m(R), m(N2)))],
                )],
                AxiomId::EMT => vec![rule(
                    vec![eq(add(m(X), m(Y)), m(R))],
                    vec![],
                    vec![eq(m(X), add(m(R), neg(m(Y))))],
                )],
                AxiomId::SGEQZ => vec![rule(vec![core()], vec![], vec![geq(mul(m(L), m(R)), Pat::Zero)])],
                AxiomId::EIDI => vec![rule(
                    vec![core()],
                    vec![],
                    vec![geq(m(L), m(R)), StmtPat::new(Rel::Leq, m(L), m(R))],
                )],
                AxiomId::IMT => vec![rule(
                    vec![geq(add(m(X), m(Y)), m(R))],
                    vec![],
                    vec![geq(m(X), add(m(R), neg(m(Y))))],
                )],
                AxiomId::FPOI => vec![rule(
                    vec![geq(m(L), m(R)), geq(m(N1), m(N2))],
                    vec![],
                    vec![geq(add(m(L), m(N1)), add(m(R), m(N2)))],
                )],
                AxiomId::SPOI => vec![rule(
                    vec![geq(m(L), m(R)), geq(m(N1), Pat::Zero)],
                    vec![],
                    vec![geq(mul(m(L), m(N1)), mul(m(R), m(N1)))],
                )],
            })
            .collect()
    })
}

fn specs() -> &'static [AxiomSpec] {
    static SPECS: OnceLock<Vec<AxiomSpec>> = OnceLock::new();
    SPECS.get_or_init(|| {
        AxiomId::ALL
            .iter()
            .map(|&id| {
                let rules = &rule_table()[id.index()];
                let first = &rules[0];
                let mut argument_roles = vec![ArgRole::FactRoot; first.arg_premises.len()];
                argument_roles.extend(first.samples.iter().map(|_| ArgRole::SampledEntity));
                let transforms = &transform_table()[id.index()];
                let has_transformation = !transforms.is_empty();
                let bidirectional = has_transformation && !matches!(id, AxiomId::AS | AxiomId::MS);
                let extension_core_form = match first.arg_premises[0].rel {
                    Rel::Geq => CoreForm::Inequality,
                    _ => CoreForm::Equality,
                };
                AxiomSpec {
                    id,
                    arity: rules.iter().map(Rule::arity).max().unwrap_or(0).max(1),
                    argument_roles,
                    has_transformation,
                    extension_core_form,
                    bidirectional,
                }
            })
            .collect()
    })
}

pub(crate) fn rules(axiom: AxiomId) -> &'static [Rule] {
    &rule_table()[axiom.index()]
}

/// Statement rule selected by `direction` for the two-orientation axioms.
pub(crate) fn rule_for(axiom: AxiomId, direction: Direction) -> &'static Rule {
    let rules = rules(axiom);
    match direction {
        Direction::Reverse if rules.len() > 1 => &rules[1],
        _ => &rules[0],
    }
}

/// Matches `node` against the axiom's left pattern (forward) or right pattern
/// (reverse). A reverse match only counts when it binds every metavariable the
/// left pattern needs, so `0` does not reverse-match `x1+(-x1)`.
pub fn match_transform(
    axiom: AxiomId,
    node: &Entity,
    direction: Direction,
) -> Result<Option<Binding>, AxiomError> {
    Ok(match_transform_rule(axiom, node, direction)?.map(|(_, b)| b))
}

fn match_transform_rule(
    axiom: AxiomId,
    node: &Entity,
    direction: Direction,
) -> Result<Option<(&'static TransformRule, Binding)>, AxiomError> {
    let rules = &transform_table()[axiom.index()];
    if rules.is_empty() {
        return Err(AxiomError::NotATransformAxiom(axiom));
    }
    for rule in rules {
        let mut b = Binding::default();
        let (from, to) = match direction {
            Direction::Forward => (&rule.lhs, &rule.rhs),
            Direction::Reverse => (&rule.rhs, &rule.lhs),
        };
        if from.matches(node, &mut b) && to.build(&b).is_some() {
            return Ok(Some((rule, b)));
        }
    }
    Ok(None)
}

pub fn rewrite(axiom: AxiomId, node: &Entity, direction: Direction) -> Result<Entity, AxiomError> {
    rewrite_with_conditions(axiom, node, direction).map(|(e, _)| e)
}

/// Rewritten node plus the side conditions the rewrite relies on.
pub(crate) fn rewrite_with_conditions(
    axiom: AxiomId,
    node: &Entity,
    direction: Direction,
) -> Result<(Entity, Vec<Statement>), AxiomError> {
    let (rule, b) = match_transform_rule(axiom, node, direction)?
        .ok_or(AxiomError::PatternMismatch { axiom })?;
    let to = match direction {
        Direction::Forward => &rule.rhs,
        Direction::Reverse => &rule.lhs,
    };
    let out = to.build(&b).ok_or(AxiomError::PatternMismatch { axiom })?;
    let side = match (direction, &rule.side) {
        (Direction::Forward, Some(p)) => vec![p.build(&b).ok_or(AxiomError::PatternMismatch { axiom })?],
        _ => Vec::new(),
    };
    Ok((out, side))
}

/// Instantiates the axiom on resolved arguments.
///
/// A single entity argument selects the rewrite form (`node = node'`);
/// otherwise the statement form applies, with statement arguments first and
/// sampled entities after. Arguments beyond what the form needs are ignored.
pub fn apply_forward(axiom: AxiomId, args: &[Arg], direction: Direction) -> Result<Implication, AxiomError> {
    match args.first() {
        None => Err(AxiomError::ArityMismatch { axiom, expected: axiom.spec().arity, got: 0 }),
        Some(Arg::Entity(node)) => {
            let (out, side) = rewrite_with_conditions(axiom, node, direction).map_err(|e| match e {
                AxiomError::NotATransformAxiom(_) => AxiomError::ArgumentKind { axiom, index: 0 },
                other => other,
            })?;
            Ok(Implication { assumptions: side, conclusions: vec![Statement::eq(node.clone(), out)] })
        }
        Some(Arg::Statement(_)) => {
            let rule = rule_for(axiom, direction);
            let need = rule.arity();
            if args.len() < need {
                return Err(AxiomError::ArityMismatch { axiom, expected: need, got: args.len() });
            }
            let mut b = Binding::default();
            for (i, pat) in rule.arg_premises.iter().enumerate() {
                let Arg::Statement(s) = &args[i] else {
                    return Err(AxiomError::ArgumentKind { axiom, index: i });
                };
                if !pat.matches(s, &mut b) {
                    return Err(AxiomError::PatternMismatch { axiom });
                }
            }
            for (j, &slot) in rule.samples.iter().enumerate() {
                let index = rule.arg_premises.len() + j;
                let Arg::Entity(e) = &args[index] else {
                    return Err(AxiomError::ArgumentKind { axiom, index });
                };
                b.set(slot, e.clone());
            }
            let assumptions = rule.assumptions(&b).ok_or(AxiomError::PatternMismatch { axiom })?;
            let conclusions = rule.conclusions(&b).ok_or(AxiomError::PatternMismatch { axiom })?;
            Ok(Implication { assumptions, conclusions })
        }
    }
}

/// Inverts the statement form against a goal: finds a rule conclusion that
/// matches `goal` and returns the instantiated implication.
pub fn apply_backward(axiom: AxiomId, goal: &Statement) -> Result<Implication, AxiomError> {
    for rule in rules(axiom) {
        for concl in &rule.conclusions {
            let mut b = Binding::default();
            if !concl.matches(goal, &mut b) {
                continue;
            }
            if let (Some(assumptions), Some(conclusions)) = (rule.assumptions(&b), rule.conclusions(&b)) {
                return Ok(Implication { assumptions, conclusions });
            }
        }
    }
    Err(AxiomError::PatternMismatch { axiom })
}

/// Result of one extension step, with what the kernel needs to replay it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionTrace {
    pub conclusion: Statement,
    pub new_premises: Vec<Statement>,
    /// Orientation chosen for MO/AZ (reverse = the `1*x` / `0+x` form).
    pub direction: Direction,
    /// Entities bound to the rule's sampled slots, in argument order.
    pub samples: Vec<Entity>,
}

/// Wraps `core` with the axiom's extension rule, sampling nodes from `pool`
/// uniformly with replacement.
pub fn extend<R: Rng + ?Sized>(
    axiom: AxiomId,
    core: &Statement,
    pool: &[Entity],
    rng: &mut R,
) -> Result<(Statement, Vec<Statement>), AxiomError> {
    extend_traced(axiom, core, pool, rng).map(|t| (t.conclusion, t.new_premises))
}

pub fn extend_traced<R: Rng + ?Sized>(
    axiom: AxiomId,
    core: &Statement,
    pool: &[Entity],
    rng: &mut R,
) -> Result<ExtensionTrace, AxiomError> {
    let rules = rules(axiom);
    let direction = if rules.len() > 1 && rng.gen_bool(0.5) { Direction::Reverse } else { Direction::Forward };
    let rule = rule_for(axiom, direction);
    let mut b = Binding::default();
    if !rule.arg_premises[0].matches(core, &mut b) {
        return Err(AxiomError::CoreFormMismatch { axiom });
    }
    let mut free = Vec::new();
    for p in &rule.arg_premises[1..] {
        p.metas(&mut free);
    }
    for &slot in &rule.samples {
        if !free.contains(&slot) {
            free.push(slot);
        }
    }
    free.retain(|slot| b.get(*slot as usize).is_none());
    if !free.is_empty() && pool.is_empty() {
        return Err(AxiomError::EmptyPool(axiom));
    }
    for &slot in &free {
        b.set(slot, pool[rng.gen_range(0..pool.len())].clone());
    }
    let bad = || AxiomError::PatternMismatch { axiom };
    let conclusion = rule.conclusions[0].build(&b).ok_or_else(bad)?;
    let new_premises = rule.arg_premises[1..]
        .iter()
        .chain(&rule.side_conditions)
        .map(|p| p.build(&b))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(bad)?;
    let samples = rule
        .samples
        .iter()
        .map(|s| b.get(*s as usize).cloned())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(bad)?;
    Ok(ExtensionTrace { conclusion, new_premises, direction, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_entity, parse_statement};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(s: &str) -> Entity {
        parse_entity(s).unwrap()
    }

    fn st(s: &str) -> Statement {
        parse_statement(s).unwrap()
    }

    #[test]
    fn table_shape() {
        assert_eq!(AxiomId::ALL.len(), 18);
        assert_eq!(AxiomId::FIELD.len(), 13);
        let transforms: Vec<_> =
            AxiomId::ALL.iter().filter(|a| a.spec().has_transformation).map(|a| a.code()).collect();
        assert_eq!(transforms, ["AC", "AA", "AS", "MC", "MA", "MS", "AMLD", "AMRD", "SD", "MO", "AZ"]);
        let ineq: Vec<_> = AxiomId::ALL
            .iter()
            .filter(|a| a.spec().extension_core_form == CoreForm::Inequality)
            .map(|a| a.code())
            .collect();
        assert_eq!(ineq, ["IMT", "FPOI", "SPOI"]);
        assert!(AxiomId::ALL.iter().all(|a| (1..=3).contains(&a.spec().arity)));
    }

    #[test]
    fn codes_round_trip() {
        for a in AxiomId::ALL {
            assert_eq!(a.code().parse::<AxiomId>().unwrap(), a);
            assert_eq!(a.name().parse::<AxiomId>().unwrap(), a);
        }
        assert_eq!("FPI".parse::<AxiomId>().unwrap(), AxiomId::FPOI);
        assert!("XYZ".parse::<AxiomId>().is_err());
    }

    #[test]
    fn addition_zero_instance() {
        let imp = apply_forward(AxiomId::AZ, &[Arg::Entity(e("(a+0)"))], Direction::Forward).unwrap();
        assert!(imp.assumptions.is_empty());
        assert_eq!(imp.conclusions, vec![st("(a+0)=a")]);
    }

    #[test]
    fn first_principle_instance() {
        let imp = apply_forward(
            AxiomId::FPOI,
            &[Arg::Statement(st("a>=b")), Arg::Statement(st("c>=d"))],
            Direction::Forward,
        )
        .unwrap();
        assert_eq!(imp.assumptions, vec![st("a>=b"), st("c>=d")]);
        assert_eq!(imp.conclusions, vec![st("(a+c)>=(b+d)")]);
    }

    #[test]
    fn double_inequality_instance() {
        let imp = apply_forward(AxiomId::EIDI, &[Arg::Statement(st("a=b"))], Direction::Forward).unwrap();
        assert_eq!(imp.assumptions, vec![st("a=b")]);
        assert_eq!(imp.conclusions, vec![st("a>=b"), st("a<=b")]);
    }

    #[test]
    fn forward_errors() {
        assert!(matches!(
            apply_forward(AxiomId::AZ, &[Arg::Entity(e("(a+b)"))], Direction::Forward),
            Err(AxiomError::PatternMismatch { .. })
        ));
        assert!(matches!(
            apply_forward(AxiomId::AA, &[Arg::Statement(st("a=b"))], Direction::Forward),
            Err(AxiomError::ArityMismatch { expected: 3, got: 1, .. })
        ));
        assert!(matches!(
            apply_forward(AxiomId::FPOI, &[Arg::Statement(st("a=b")), Arg::Statement(st("c>=d"))], Direction::Forward),
            Err(AxiomError::PatternMismatch { .. })
        ));
        assert!(matches!(
            apply_forward(AxiomId::EIDI, &[Arg::Entity(e("a"))], Direction::Forward),
            Err(AxiomError::ArgumentKind { index: 0, .. })
        ));
        assert!(matches!(apply_forward(AxiomId::EIDI, &[], Direction::Forward), Err(AxiomError::ArityMismatch { .. })));
    }

    #[test]
    fn multiplication_simplification_requires_nonzero() {
        let imp = apply_forward(AxiomId::MS, &[Arg::Statement(st("a=b"))], Direction::Forward).unwrap();
        assert_eq!(imp.assumptions, vec![st("a=b"), st("a!=0")]);
        assert_eq!(imp.conclusions, vec![st("1=(a*(1/b))")]);
        let imp = apply_forward(AxiomId::MS, &[Arg::Entity(e("(c*(1/c))"))], Direction::Forward).unwrap();
        assert_eq!(imp.assumptions, vec![st("c!=0")]);
    }

    #[test]
    fn transform_matching() {
        let b = match_transform(AxiomId::AC, &e("(p+q)"), Direction::Forward).unwrap().unwrap();
        assert_eq!(b.get(0), Some(&e("p")));
        assert_eq!(b.get(1), Some(&e("q")));

        assert!(match_transform(AxiomId::AS, &e("(a+(-b))"), Direction::Forward).unwrap().is_none());

        let b = match_transform(AxiomId::AA, &e("((a+b)+(c+d))"), Direction::Forward).unwrap().unwrap();
        assert_eq!(b.get(0), Some(&e("(a+b)")));
        assert_eq!(b.get(1), Some(&e("c")));
        assert_eq!(b.get(2), Some(&e("d")));

        assert!(matches!(
            match_transform(AxiomId::EIDI, &e("a"), Direction::Forward),
            Err(AxiomError::NotATransformAxiom(AxiomId::EIDI))
        ));
        // 0 alone does not determine x1 in x1+(-x1)
        assert!(match_transform(AxiomId::AS, &e("0"), Direction::Reverse).unwrap().is_none());
        assert!(match_transform(AxiomId::MO, &e("(1*a)"), Direction::Forward).unwrap().is_some());
        assert!(match_transform(AxiomId::AZ, &e("(0+a)"), Direction::Forward).unwrap().is_some());
    }

    #[test]
    fn rewrites() {
        assert_eq!(rewrite(AxiomId::AC, &e("(p+q)"), Direction::Forward).unwrap(), e("(q+p)"));
        assert_eq!(rewrite(AxiomId::AMLD, &e("((x+y)*z)"), Direction::Forward).unwrap(), e("((x*z)+(y*z))"));
        assert_eq!(rewrite(AxiomId::AC, &e("(q+p)"), Direction::Reverse).unwrap(), e("(p+q)"));
        assert_eq!(rewrite(AxiomId::SD, &e("(a^2)"), Direction::Forward).unwrap(), e("(a*a)"));
        assert_eq!(rewrite(AxiomId::SD, &e("(a*a)"), Direction::Reverse).unwrap(), e("(a^2)"));
        assert_eq!(rewrite(AxiomId::AZ, &e("a"), Direction::Reverse).unwrap(), e("(a+0)"));
        assert!(matches!(
            rewrite(AxiomId::AMLD, &e("((x*y)*z)"), Direction::Forward),
            Err(AxiomError::PatternMismatch { .. })
        ));
        // the two products must share their right factor
        assert!(rewrite(AxiomId::AMLD, &e("((a*c)+(b*d))"), Direction::Reverse).is_err());
    }

    #[test]
    fn backward_inverts_rules() {
        let imp = apply_backward(AxiomId::FPOI, &st("((a+(b+c))+d)>=(((b+a)+c)+e)")).unwrap();
        assert_eq!(imp.assumptions, vec![st("(a+(b+c))>=((b+a)+c)"), st("d>=e")]);
        let imp = apply_backward(AxiomId::EIDI, &st("a<=b")).unwrap();
        assert_eq!(imp.assumptions, vec![st("a=b")]);
        let imp = apply_backward(AxiomId::AZ, &st("(0+a)=b")).unwrap();
        assert_eq!(imp.assumptions, vec![st("a=b")]);
        assert!(apply_backward(AxiomId::FPOI, &st("a>=b")).is_err());
    }

    #[test]
    fn extension_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let core = st("(a+(b+c))>=((b+a)+c)");
        let t = extend_traced(AxiomId::FPOI, &core, &[e("d")], &mut rng).unwrap();
        assert_eq!(t.conclusion, st("((a+(b+c))+d)>=(((b+a)+c)+d)"));
        assert_eq!(t.new_premises, vec![st("d>=d")]);

        let (c, p) = extend(AxiomId::EIDI, &st("(a+(b+c))=((b+a)+c)"), &[], &mut rng).unwrap();
        assert_eq!(c, st("(a+(b+c))>=((b+a)+c)"));
        assert!(p.is_empty());

        let mut seen = std::collections::HashSet::new();
        for _ in 0..64 {
            let (c, p) = extend(AxiomId::AZ, &st("x=y"), &[], &mut rng).unwrap();
            assert!(p.is_empty());
            seen.insert(c.to_string());
        }
        assert_eq!(seen.len(), 2);
        assert!(seen.contains("(x+0)=y") && seen.contains("(0+x)=y"));

        assert!(matches!(
            extend(AxiomId::FPOI, &st("a=b"), &[e("a")], &mut rng),
            Err(AxiomError::CoreFormMismatch { .. })
        ));
        assert!(matches!(
            extend(AxiomId::EMT, &st("a=b"), &[e("a")], &mut rng),
            Err(AxiomError::CoreFormMismatch { .. })
        ));
        assert!(matches!(extend(AxiomId::AC, &st("a=b"), &[], &mut rng), Err(AxiomError::EmptyPool(_))));
        let (c, _) = extend(AxiomId::EMT, &st("(a+b)=c"), &[], &mut rng).unwrap();
        assert_eq!(c, st("a=(c+(-b))"));
        let (c, p) = extend(AxiomId::MS, &st("a=b"), &[], &mut rng).unwrap();
        assert_eq!(c, st("1=(a*(1/b))"));
        assert_eq!(p, vec![st("a!=0")]);
    }
}
