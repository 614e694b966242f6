//! Proof states, steps and replay verification.
//!
//! Step semantics (in `step.rs`):
//!
//! * a node argument selects the rewrite form; at a goal node the goal is
//!   rewritten in place, at a premise or fact node the rewritten statement is
//!   added to the facts;
//! * otherwise the first argument is a statement. In forward mode the
//!   instantiated assumptions must all be known, and the conclusions become
//!   facts. In backward mode the argument must be a goal matching one of the
//!   rule's conclusions, and it is replaced by the assumptions not yet known.
//!
//! A statement is known when both sides are identical (or it is `1!=0`), or
//! it is a premise or fact. Goals that become known are dropped after every
//! accepted step, so premise discharge needs no explicit step.

mod step;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::axioms::{AxiomId, Direction};
use crate::expr::{NodePath, Statement, StatementScope};

pub use step::apply_step;

pub const MAX_ARGS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProofStep {
    pub axiom: AxiomId,
    pub args: Vec<NodePath>,
    #[serde(default)]
    pub direction: Direction,
    #[serde(default)]
    pub mode: Mode,
}

impl ProofStep {
    pub fn new(axiom: AxiomId, args: Vec<NodePath>) -> Self {
        ProofStep { axiom, args, direction: Direction::Forward, mode: Mode::Forward }
    }

    pub fn reverse(mut self) -> Self {
        self.direction = Direction::Reverse;
        self
    }

    pub fn backward(mut self) -> Self {
        self.mode = Mode::Backward;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TheoremMeta {
    pub k: usize,
    pub l: usize,
    pub degree: usize,
    pub axiom_order: Vec<AxiomId>,
    pub seed: u64,
    /// The scaffolding statement `X=X` the theorem was grown from.
    pub initial_condition: Option<Statement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Theorem {
    pub goal: Statement,
    pub premises: Vec<Statement>,
    pub proof: Option<Vec<ProofStep>>,
    pub meta: TheoremMeta,
}

impl Theorem {
    pub fn new(goal: Statement, premises: Vec<Statement>) -> Self {
        Theorem { goal, premises, proof: None, meta: TheoremMeta::default() }
    }

    /// Premises other than reflexive scaffolding.
    pub fn informative_premises(&self) -> impl Iterator<Item = &Statement> {
        self.premises.iter().filter(|p| !p.is_reflexive())
    }

    /// Canonical `(goal, premises)` key: premises sorted by their text.
    pub fn canonical_key(&self) -> String {
        let mut prem: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
        prem.sort();
        format!("{}|{}", self.goal, prem.join(";"))
    }

    /// Character length of the rendered theorem (goal and informative premises).
    pub fn text_len(&self) -> usize {
        self.goal.to_string().len() + self.informative_premises().map(|p| p.to_string().len()).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ProofState {
    pub goals: Vec<Statement>,
    pub premises: Vec<Statement>,
    pub facts: Vec<Statement>,
    pub steps_taken: usize,
}

impl StatementScope for ProofState {
    fn goals(&self) -> &[Statement] {
        &self.goals
    }

    fn premises(&self) -> &[Statement] {
        &self.premises
    }

    fn facts(&self) -> &[Statement] {
        &self.facts
    }
}

impl ProofState {
    pub fn knows(&self, s: &Statement) -> bool {
        s.is_reflexive() || self.premises.contains(s) || self.facts.contains(s)
    }

    pub fn proven(&self) -> bool {
        self.goals.iter().all(|g| self.knows(g))
    }

    pub fn node_count(&self) -> usize {
        [&self.goals, &self.premises, &self.facts].iter().flat_map(|v| v.iter()).map(Statement::node_count).sum()
    }

    pub fn statement_count(&self) -> usize {
        self.goals.len() + self.premises.len() + self.facts.len()
    }
}

pub fn init_state(theorem: &Theorem) -> ProofState {
    let mut premises: Vec<Statement> = Vec::with_capacity(theorem.premises.len());
    for p in &theorem.premises {
        if !premises.contains(p) {
            premises.push(p.clone());
        }
    }
    ProofState { goals: vec![theorem.goal.clone()], premises, facts: Vec::new(), steps_taken: 0 }
}

/// Why the kernel refused a step.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
#[serde(tag = "code", content = "detail", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rejection {
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("wrong argument kind: {0}")]
    ArgumentKind(String),
    #[error("pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("assumption not known: {0}")]
    AssumptionsUnknown(String),
    #[error("{0} is not a goal")]
    NotAGoal(String),
}

impl Rejection {
    pub fn code(&self) -> &'static str {
        match self {
            Rejection::InvalidPath(_) => "INVALID_PATH",
            Rejection::ArityMismatch(_) => "ARITY_MISMATCH",
            Rejection::ArgumentKind(_) => "ARGUMENT_KIND",
            Rejection::PatternMismatch(_) => "PATTERN_MISMATCH",
            Rejection::AssumptionsUnknown(_) => "ASSUMPTIONS_UNKNOWN",
            Rejection::NotAGoal(_) => "NOT_A_GOAL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepResult {
    pub next_state: ProofState,
    pub accepted: bool,
    pub proven: bool,
    pub rejection: Option<Rejection>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyFailure {
    #[error("step {step_index} rejected: {reason}")]
    Rejected { step_index: usize, reason: Rejection },
    #[error("goals remain open after {steps} steps")]
    Unproven { steps: usize },
}

impl VerifyFailure {
    pub fn step_index(&self) -> Option<usize> {
        match self {
            VerifyFailure::Rejected { step_index, .. } => Some(*step_index),
            VerifyFailure::Unproven { .. } => None,
        }
    }
}

/// Replays `proof` from the initial state, reporting the first failure.
pub fn verify_trace(theorem: &Theorem, proof: &[ProofStep]) -> Result<ProofState, VerifyFailure> {
    let mut state = init_state(theorem);
    for (step_index, step) in proof.iter().enumerate() {
        let r = apply_step(&state, step);
        if let Some(reason) = r.rejection {
            return Err(VerifyFailure::Rejected { step_index, reason });
        }
        state = r.next_state;
    }
    if state.proven() {
        Ok(state)
    } else {
        Err(VerifyFailure::Unproven { steps: proof.len() })
    }
}

pub fn verify(theorem: &Theorem, proof: &[ProofStep]) -> bool {
    verify_trace(theorem, proof).is_ok()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("empty benchmark corpus")]
pub struct EmptyCorpus;

#[derive(Clone, Debug)]
pub struct LatencyReport {
    pub steps: usize,
    pub mean_ms: f64,
    pub accepted: Vec<bool>,
}

/// Wall-clock mean of [`apply_step`] over the corpus.
pub fn bench_step_latency(corpus: &[(ProofState, ProofStep)]) -> Result<LatencyReport, EmptyCorpus> {
    if corpus.is_empty() {
        return Err(EmptyCorpus);
    }
    let mut accepted = Vec::with_capacity(corpus.len());
    let start = Instant::now();
    for (state, step) in corpus {
        accepted.push(std::hint::black_box(apply_step(state, step)).accepted);
    }
    let elapsed = start.elapsed();
    Ok(LatencyReport {
        steps: corpus.len(),
        mean_ms: elapsed.as_secs_f64() * 1e3 / corpus.len() as f64,
        accepted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_statement, Side, StmtRef};

    fn st(s: &str) -> Statement {
        parse_statement(s).unwrap()
    }

    fn node(stmt: StmtRef, side: Side, path: &[u8]) -> NodePath {
        NodePath::node(stmt, side, path.to_vec())
    }

    #[test]
    fn init_states() {
        let s = init_state(&Theorem::new(st("(a+0)=a"), vec![]));
        assert_eq!(s.goals.len(), 1);
        assert!(s.facts.is_empty());
        assert!(!s.proven());
        assert!(init_state(&Theorem::new(st("a=a"), vec![])).proven());
        let s = init_state(&Theorem::new(st("((a+(b+c))+d)>=(((b+a)+c)+e)"), vec![st("d>=e")]));
        assert_eq!(s.premises, vec![st("d>=e")]);
    }

    #[test]
    fn triviality() {
        let s = ProofState { premises: vec![st("d>=e")], ..Default::default() };
        assert!(s.knows(&st("a=a")));
        assert!(s.knows(&st("d>=e")));
        assert!(!ProofState::default().knows(&st("(a+0)=a")));
    }

    #[test]
    fn goal_rewrite_closes_addition_zero() {
        let t = Theorem::new(st("(a+0)=a"), vec![]);
        let s = init_state(&t);
        let r = apply_step(&s, &ProofStep::new(AxiomId::AZ, vec![node(StmtRef::Goal(0), Side::Lhs, &[])]));
        assert!(r.accepted && r.proven);
        assert!(r.next_state.goals.is_empty());
        assert_eq!(r.next_state.steps_taken, 1);
    }

    #[test]
    fn backward_first_principle_discharges_premise() {
        let t = Theorem::new(st("((a+(b+c))+d)>=(((b+a)+c)+e)"), vec![st("d>=e")]);
        let s = init_state(&t);
        let step = ProofStep::new(AxiomId::FPOI, vec![NodePath::statement(StmtRef::Goal(0))]).backward();
        let r = apply_step(&s, &step);
        assert!(r.accepted);
        assert!(!r.proven);
        assert_eq!(r.next_state.goals, vec![st("(a+(b+c))>=((b+a)+c)")]);
    }

    #[test]
    fn rejection_preserves_state() {
        let t = Theorem::new(st("(a+b)=(b+a)"), vec![]);
        let s = init_state(&t);
        // EIDI forward on a goal: its assumption is not known
        let step = ProofStep::new(AxiomId::EIDI, vec![NodePath::statement(StmtRef::Goal(0))]);
        let r = apply_step(&s, &step);
        assert!(!r.accepted);
        assert!(matches!(r.rejection, Some(Rejection::AssumptionsUnknown(_))));
        assert_eq!(r.next_state.goals, s.goals);
        assert_eq!(r.next_state.facts, s.facts);
        assert_eq!(r.next_state.steps_taken, 1);

        let bad_path = ProofStep::new(AxiomId::AC, vec![node(StmtRef::Fact(3), Side::Lhs, &[])]);
        assert!(matches!(apply_step(&s, &bad_path).rejection, Some(Rejection::InvalidPath(_))));
        let no_args = ProofStep::new(AxiomId::AC, vec![]);
        assert!(matches!(apply_step(&s, &no_args).rejection, Some(Rejection::ArityMismatch(_))));
        let mismatch = ProofStep::new(AxiomId::AZ, vec![node(StmtRef::Goal(0), Side::Lhs, &[])]);
        assert!(matches!(apply_step(&s, &mismatch).rejection, Some(Rejection::PatternMismatch(_))));
        let not_goal = ProofStep::new(AxiomId::EIDI, vec![NodePath::statement(StmtRef::Premise(0))]).backward();
        assert!(!apply_step(&s, &not_goal).accepted);
    }

    #[test]
    fn fact_rewrite_adds_rewritten_statement() {
        let t = Theorem::new(st("(b+a)=c"), vec![st("(a+b)=c")]);
        let s = init_state(&t);
        let r = apply_step(&s, &ProofStep::new(AxiomId::AC, vec![node(StmtRef::Premise(0), Side::Lhs, &[])]));
        assert!(r.accepted && r.proven);
        assert_eq!(r.next_state.facts, vec![st("(b+a)=c")]);
    }

    #[test]
    fn multiplication_simplification_needs_nonzero_premise() {
        let step = ProofStep::new(AxiomId::MS, vec![NodePath::statement(StmtRef::Premise(0))]);
        let without = init_state(&Theorem::new(st("1=(a*(1/b))"), vec![st("a=b")]));
        assert!(!apply_step(&without, &step).accepted);
        let with = init_state(&Theorem::new(st("1=(a*(1/b))"), vec![st("a=b"), st("a!=0")]));
        assert!(apply_step(&with, &step).proven);

        // rewriting a goal node under MS opens the nonzero side goal
        let t = Theorem::new(st("(a*(1/a))=1"), vec![]);
        let s = init_state(&t);
        let r = apply_step(&s, &ProofStep::new(AxiomId::MS, vec![node(StmtRef::Goal(0), Side::Lhs, &[])]));
        assert!(r.accepted && !r.proven);
        assert_eq!(r.next_state.goals, vec![st("a!=0")]);
    }

    #[test]
    fn verify_trivial_and_failures() {
        assert!(verify(&Theorem::new(st("a=a"), vec![]), &[]));
        let t = Theorem::new(st("(a+0)=a"), vec![]);
        assert_eq!(verify_trace(&t, &[]), Err(VerifyFailure::Unproven { steps: 0 }));
        let bad = ProofStep::new(AxiomId::AC, vec![node(StmtRef::Goal(0), Side::Rhs, &[])]);
        assert_eq!(verify_trace(&t, &[bad]).unwrap_err().step_index(), Some(0));
    }

    #[test]
    fn bench_rejects_empty_corpus() {
        assert!(bench_step_latency(&[]).is_err());
    }

    #[test]
    fn steps_serialize_with_codes() {
        let step = ProofStep::new(AxiomId::FPOI, vec![NodePath::statement(StmtRef::Goal(0))]).backward();
        let json = serde_json::to_string(&step).unwrap();
        assert_eq!(json, r#"{"axiom":"FPOI","args":["g0"],"direction":"forward","mode":"backward"}"#);
        assert_eq!(serde_json::from_str::<ProofStep>(&json).unwrap(), step);
    }
}
