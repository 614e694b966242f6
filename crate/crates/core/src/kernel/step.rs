//! Step semantics. Everything that decides whether a statement becomes
//! proven lives in this file.

use crate::axioms::{self, Arg, AxiomError};
use crate::expr::{PathError, Statement, StatementScope, StmtRef};

use super::{Mode, ProofState, ProofStep, Rejection, StepResult, MAX_ARGS};

enum Change {
    /// Goal `index` is replaced by `with` (possibly empty).
    ReplaceGoal { index: usize, with: Vec<Statement> },
    AddFacts(Vec<Statement>),
}

impl From<PathError> for Rejection {
    fn from(e: PathError) -> Self {
        Rejection::InvalidPath(e.to_string())
    }
}

impl From<AxiomError> for Rejection {
    fn from(e: AxiomError) -> Self {
        match e {
            AxiomError::ArityMismatch { .. } => Rejection::ArityMismatch(e.to_string()),
            AxiomError::ArgumentKind { .. } | AxiomError::NotATransformAxiom(_) => {
                Rejection::ArgumentKind(e.to_string())
            }
            _ => Rejection::PatternMismatch(e.to_string()),
        }
    }
}

fn require_known(state: &ProofState, stmts: &[Statement]) -> Result<(), Rejection> {
    match stmts.iter().find(|s| !state.knows(s)) {
        Some(s) => Err(Rejection::AssumptionsUnknown(s.to_string())),
        None => Ok(()),
    }
}

fn transition(state: &ProofState, step: &ProofStep) -> Result<Change, Rejection> {
    if step.args.len() > MAX_ARGS {
        return Err(Rejection::ArityMismatch(format!("at most {MAX_ARGS} arguments")));
    }
    let first = step.args.first().ok_or_else(|| Rejection::ArityMismatch("no arguments".into()))?;

    if !first.is_statement() {
        // Rewrite form: a goal is rewritten in place, a known statement
        // yields its rewritten copy as a new fact.
        let node = state.resolve(first)?.clone();
        let imp = axioms::apply_forward(step.axiom, &[Arg::Entity(node)], step.direction)?;
        let rewritten = imp.conclusions[0].rhs.clone();
        let updated = state.replace(first, rewritten)?;
        return match first.stmt {
            StmtRef::Goal(index) => {
                let mut with = vec![updated];
                with.extend(imp.assumptions.into_iter().filter(|a| !state.knows(a)));
                Ok(Change::ReplaceGoal { index, with })
            }
            _ => {
                require_known(state, &imp.assumptions)?;
                Ok(Change::AddFacts(vec![updated]))
            }
        };
    }

    match step.mode {
        Mode::Backward => {
            let StmtRef::Goal(index) = first.stmt else {
                return Err(Rejection::NotAGoal(first.to_string()));
            };
            let goal = state.statement(first.stmt)?;
            let imp = axioms::apply_backward(step.axiom, goal)?;
            let with = imp.assumptions.into_iter().filter(|a| !state.knows(a)).collect();
            Ok(Change::ReplaceGoal { index, with })
        }
        Mode::Forward => {
            let args = step
                .args
                .iter()
                .map(|p| {
                    if p.is_statement() {
                        state.statement(p.stmt).map(|s| Arg::Statement(s.clone()))
                    } else {
                        state.resolve(p).map(|e| Arg::Entity(e.clone()))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            let imp = axioms::apply_forward(step.axiom, &args, step.direction)?;
            require_known(state, &imp.assumptions)?;
            Ok(Change::AddFacts(imp.conclusions))
        }
    }
}

/// Applies one step. Rejected steps still consume a step but leave goals,
/// premises and facts untouched.
pub fn apply_step(state: &ProofState, step: &ProofStep) -> StepResult {
    let mut next = state.clone();
    next.steps_taken += 1;
    match transition(state, step) {
        Ok(change) => {
            match change {
                Change::ReplaceGoal { index, with } => {
                    next.goals.splice(index..=index, with);
                }
                Change::AddFacts(stmts) => {
                    for s in stmts {
                        if !next.premises.contains(&s) && !next.facts.contains(&s) {
                            next.facts.push(s);
                        }
                    }
                }
            }
            let pruned: Vec<Statement> = next.goals.iter().filter(|g| !next.knows(g)).cloned().collect();
            next.goals = pruned;
            let proven = next.proven();
            StepResult { next_state: next, accepted: true, proven, rejection: None }
        }
        Err(rejection) => {
            let proven = next.proven();
            StepResult { next_state: next, accepted: false, proven, rejection: Some(rejection) }
        }
    }
}
