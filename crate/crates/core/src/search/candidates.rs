//! Enumeration of concrete steps an axiom could take in a state.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::axioms::{self, AxiomId, Binding, Direction};
use crate::expr::{enumerate_nodes, NodePath, StatementScope, StmtRef};
use crate::kernel::{apply_step, Mode, ProofState, ProofStep, StepResult};

fn known_refs(state: &ProofState) -> Vec<StmtRef> {
    (0..state.premises.len())
        .map(StmtRef::Premise)
        .chain((0..state.facts.len()).map(StmtRef::Fact))
        .collect()
}

/// Unvalidated candidate steps for `axiom`: rewrites at every matching node
/// (both directions where the axiom allows), forward statement
/// applications on known statements with randomly chosen sample nodes, and
/// backward applications on matching goals.
pub fn candidate_steps<R: Rng + ?Sized>(state: &ProofState, axiom: AxiomId, rng: &mut R) -> Vec<ProofStep> {
    let spec = axiom.spec();
    let nodes = enumerate_nodes(state);
    let mut out = Vec::new();

    if spec.has_transformation {
        let dirs: &[Direction] =
            if spec.bidirectional { &[Direction::Forward, Direction::Reverse] } else { &[Direction::Forward] };
        for (path, e) in &nodes {
            for &dir in dirs {
                if matches!(axioms::match_transform(axiom, e, dir), Ok(Some(_))) {
                    out.push(ProofStep { axiom, args: vec![path.clone()], direction: dir, mode: Mode::Forward });
                }
            }
        }
    }

    let rules = axioms::rules(axiom);
    let known = known_refs(state);
    for (ri, rule) in rules.iter().enumerate() {
        let direction = if ri == 0 { Direction::Forward } else { Direction::Reverse };
        // partial argument lists whose statement patterns matched so far
        let mut partial: Vec<(Vec<NodePath>, Binding)> = vec![(Vec::new(), Binding::default())];
        for pat in &rule.arg_premises {
            let mut next = Vec::new();
            for (args, b) in &partial {
                for &r in &known {
                    let s = state.statement(r).expect("known refs are in range");
                    let mut b2 = b.clone();
                    if pat.matches(s, &mut b2) {
                        let mut a = args.clone();
                        a.push(NodePath::statement(r));
                        next.push((a, b2));
                    }
                }
            }
            partial = next;
        }
        for (mut args, _) in partial {
            if rule.samples.iter().any(|_| nodes.is_empty()) {
                continue;
            }
            for _ in &rule.samples {
                args.push(nodes[rng.gen_range(0..nodes.len())].0.clone());
            }
            out.push(ProofStep { axiom, args, direction, mode: Mode::Forward });
        }
    }

    for (i, goal) in state.goals.iter().enumerate() {
        if axioms::apply_backward(axiom, goal).is_ok() {
            out.push(ProofStep {
                axiom,
                args: vec![NodePath::statement(StmtRef::Goal(i))],
                direction: Direction::Forward,
                mode: Mode::Backward,
            });
        }
    }
    out
}

/// The kernel's result if `step` is accepted and changes the goals or facts.
pub fn progress(state: &ProofState, step: &ProofStep) -> Option<StepResult> {
    let r = apply_step(state, step);
    (r.accepted && (r.next_state.goals != state.goals || r.next_state.facts != state.facts)).then_some(r)
}

/// A uniformly random step among the accepted, state-changing candidates.
pub fn sample_legal_step<R: Rng + ?Sized>(state: &ProofState, axiom: AxiomId, rng: &mut R) -> Option<ProofStep> {
    let mut cands = candidate_steps(state, axiom, rng);
    cands.shuffle(rng);
    cands.into_iter().find(|s| progress(state, s).is_some())
}

/// Every accepted, state-changing candidate, in enumeration order.
pub fn legal_steps<R: Rng + ?Sized>(state: &ProofState, axiom: AxiomId, rng: &mut R) -> Vec<ProofStep> {
    candidate_steps(state, axiom, rng).into_iter().filter(|s| progress(state, s).is_some()).collect()
}
