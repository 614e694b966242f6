//! Theorem-proving environment: episodes over the kernel with a step limit,
//! action-space accounting and sequence/graph observations.

use serde::{Deserialize, Serialize};

use crate::axioms::{AxiomId, AxiomSet, Direction};
use crate::expr::{enumerate_statement_nodes, NodePath, Statement, StmtRef};
use crate::kernel::{apply_step, init_state, Mode, ProofState, ProofStep, Rejection, Theorem};

pub const GOAL_END: &str = "<GOAL_END>";
pub const PREM_END: &str = "<PREM_END>";

#[derive(Clone, Debug, PartialEq)]
pub struct EnvConfig {
    pub step_limit: usize,
    pub reward_on_success: f64,
    pub reward_otherwise: f64,
    pub axiom_set: AxiomSet,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig { step_limit: 15, reward_on_success: 1.0, reward_otherwise: 0.0, axiom_set: AxiomSet::OrderedField }
    }
}

/// An axiom with argument paths. Paths beyond the axiom's arity are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub axiom: AxiomId,
    #[serde(alias = "arg_paths")]
    pub args: Vec<NodePath>,
    #[serde(default)]
    pub direction: Direction,
    #[serde(default)]
    pub mode: Mode,
}

impl Action {
    pub fn to_step(&self) -> ProofStep {
        let arity = self.axiom.spec().arity;
        ProofStep {
            axiom: self.axiom,
            args: self.args.iter().take(arity).cloned().collect(),
            direction: self.direction,
            mode: self.mode,
        }
    }
}

impl From<ProofStep> for Action {
    fn from(s: ProofStep) -> Self {
        Action { axiom: s.axiom, args: s.args, direction: s.direction, mode: s.mode }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Goal,
    Premise,
    Fact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: usize,
    pub label: String,
    /// Address usable as an action argument.
    pub path: NodePath,
    pub role: Role,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub nodes: Vec<GraphNode>,
    /// Parent to child, by node id.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub seq: String,
    pub graph: Graph,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub accepted: bool,
    pub steps_taken: usize,
    pub rejection: Option<Rejection>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnvError {
    #[error("episode already finished")]
    EpisodeFinished,
    #[error("no episode in progress; call reset first")]
    NotReset,
}

fn join(stmts: &[Statement]) -> String {
    stmts.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("; ")
}

/// `goals <GOAL_END> premises <PREM_END> facts`, statements separated by `; `.
pub fn encode_seq(state: &ProofState) -> String {
    let parts = [join(&state.goals), GOAL_END.to_string(), join(&state.premises), PREM_END.to_string(), join(&state.facts)];
    parts.into_iter().filter(|p| !p.is_empty()).collect::<Vec<_>>().join(" ")
}

/// Per-statement trees: a relation node followed by its subterms in
/// enumeration order, statements ordered goals, premises, facts.
pub fn encode_graph(state: &ProofState) -> Graph {
    let mut g = Graph::default();
    let groups: [(&[Statement], Role, fn(usize) -> StmtRef); 3] = [
        (&state.goals, Role::Goal, StmtRef::Goal),
        (&state.premises, Role::Premise, StmtRef::Premise),
        (&state.facts, Role::Fact, StmtRef::Fact),
    ];
    for (stmts, role, mk) in groups {
        for (i, stmt) in stmts.iter().enumerate() {
            let root = g.nodes.len();
            g.nodes.push(GraphNode {
                id: root,
                label: stmt.rel.symbol().to_string(),
                path: NodePath::statement(mk(i)),
                role,
            });
            let mut side_roots = Vec::new();
            for (side, path, e) in enumerate_statement_nodes(stmt) {
                let id = g.nodes.len();
                let parent = if path.is_empty() {
                    side_roots.push((path.clone(), id));
                    root
                } else {
                    // the parent is the latest node on this side whose path is the prefix
                    let prefix = &path[..path.len() - 1];
                    g.nodes[root..]
                        .iter()
                        .rev()
                        .find(|n| n.path.side == Some(side) && n.path.path == prefix)
                        .map(|n| n.id)
                        .expect("pre-order visits parents first")
                };
                g.edges.push((parent, id));
                g.nodes.push(GraphNode { id, label: e.label(), path: NodePath::node(mk(i), side, path), role });
            }
        }
    }
    g
}

pub fn observe(state: &ProofState) -> Observation {
    Observation { seq: encode_seq(state), graph: encode_graph(state) }
}

/// Addressable nodes: one per statement plus one per subterm.
pub fn node_count(state: &ProofState) -> usize {
    state.statement_count() + state.node_count()
}

/// `|axioms| * |nodes|^3`.
pub fn action_space_size(state: &ProofState, axiom_set: AxiomSet) -> u128 {
    let n = node_count(state) as u128;
    axiom_set.axioms().len() as u128 * n * n * n
}

/// One episode at a time over a single theorem.
#[derive(Clone, Debug)]
pub struct Env {
    pub config: EnvConfig,
    state: Option<ProofState>,
    done: bool,
}

impl Default for Env {
    fn default() -> Self {
        Env::new(EnvConfig::default())
    }
}

impl Env {
    pub fn new(config: EnvConfig) -> Self {
        Env { config, state: None, done: false }
    }

    /// Starts an episode. A theorem that is already trivial leaves the
    /// episode finished at once, with [`Env::reset_reward`] granting success.
    pub fn reset(&mut self, theorem: &Theorem) -> Observation {
        let state = init_state(theorem);
        self.done = state.proven();
        let obs = observe(&state);
        self.state = Some(state);
        obs
    }

    pub fn reset_reward(&self) -> f64 {
        match &self.state {
            Some(s) if s.proven() && s.steps_taken == 0 => self.config.reward_on_success,
            _ => self.config.reward_otherwise,
        }
    }

    pub fn state(&self) -> Option<&ProofState> {
        self.state.as_ref()
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn action_space_size(&self) -> Result<u128, EnvError> {
        let state = self.state.as_ref().ok_or(EnvError::NotReset)?;
        Ok(action_space_size(state, self.config.axiom_set))
    }

    pub fn step(&mut self, action: &Action) -> Result<Transition, EnvError> {
        let state = self.state.as_ref().ok_or(EnvError::NotReset)?;
        if self.done {
            return Err(EnvError::EpisodeFinished);
        }
        let r = apply_step(state, &action.to_step());
        let limit_hit = r.next_state.steps_taken >= self.config.step_limit;
        let (reward, done) = if r.proven && r.accepted {
            (self.config.reward_on_success, true)
        } else {
            (self.config.reward_otherwise, limit_hit)
        };
        self.done = done;
        let info = StepInfo { accepted: r.accepted, steps_taken: r.next_state.steps_taken, rejection: r.rejection };
        let observation = observe(&r.next_state);
        self.state = Some(r.next_state);
        Ok(Transition { observation, reward, done, info })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_statement, Side};

    fn st(s: &str) -> Statement {
        parse_statement(s).unwrap()
    }

    fn goal_only(goal: &str) -> Theorem {
        Theorem::new(st(goal), vec![])
    }

    #[test]
    fn seq_template() {
        let s = init_state(&goal_only("(a+0)=a"));
        assert_eq!(encode_seq(&s), "(a+0)=a <GOAL_END> <PREM_END>");
        let s = ProofState { goals: vec![st("a=b")], premises: vec![st("c=d"), st("d>=e")], facts: vec![st("e=e")], steps_taken: 0 };
        assert_eq!(encode_seq(&s), "a=b <GOAL_END> c=d; d>=e <PREM_END> e=e");
    }

    #[test]
    fn graph_shape() {
        let g = encode_graph(&init_state(&goal_only("a=a")));
        assert_eq!(g.nodes.len(), 3);
        assert_eq!(g.edges, vec![(0, 1), (0, 2)]);

        let s = ProofState { goals: vec![st("((a+b)*c)=(-d)")], premises: vec![st("a>=0")], ..Default::default() };
        let g = encode_graph(&s);
        assert_eq!(g.nodes.len(), node_count(&s));
        assert_eq!(g.edges.len(), g.nodes.len() - s.statement_count());
        let labels: Vec<&str> = g.nodes.iter().map(|n| n.label.as_str()).collect();
        assert_eq!(labels, ["=", "*", "+", "a", "b", "c", "-", "d", ">=", "a", "0"]);
        assert!(g.edges.contains(&(1, 2)) && g.edges.contains(&(2, 4)) && g.edges.contains(&(6, 7)));
        assert_eq!(g.nodes[4].path.to_string(), "g0.l.0.1");
    }

    #[test]
    fn action_space_counts() {
        let s = init_state(&goal_only("a=a"));
        assert_eq!(action_space_size(&s, AxiomSet::OrderedField), 18 * 27);
        let one = ProofState { goals: vec![], ..Default::default() };
        assert_eq!(action_space_size(&one, AxiomSet::OrderedField), 0);
    }

    #[test]
    fn episode_success_and_finish() {
        let mut env = Env::default();
        let obs = env.reset(&goal_only("(a+0)=a"));
        assert_eq!(obs, env.clone().reset(&goal_only("(a+0)=a")));
        assert!(!env.is_done());
        let act = Action {
            axiom: AxiomId::AZ,
            args: vec![NodePath::node(StmtRef::Goal(0), Side::Lhs, vec![])],
            direction: Direction::Forward,
            mode: Mode::Forward,
        };
        let t = env.step(&act).unwrap();
        assert!(t.done);
        assert_eq!(t.reward, 1.0);
        assert_eq!(env.step(&act), Err(EnvError::EpisodeFinished));
    }

    #[test]
    fn trivial_theorem_is_done_at_reset() {
        let mut env = Env::default();
        env.reset(&goal_only("a=a"));
        assert!(env.is_done());
        assert_eq!(env.reset_reward(), 1.0);
    }

    #[test]
    fn step_limit_ends_with_zero_reward() {
        let mut env = Env::default();
        env.reset(&goal_only("(a+b)=(b+c)"));
        let bad = Action {
            axiom: AxiomId::AZ,
            args: vec![NodePath::node(StmtRef::Goal(0), Side::Lhs, vec![])],
            direction: Direction::Forward,
            mode: Mode::Forward,
        };
        for i in 1..=15 {
            let t = env.step(&bad).unwrap();
            assert!(!t.info.accepted);
            assert_eq!(t.reward, 0.0);
            assert_eq!(t.done, i == 15);
        }
        assert_eq!(env.step(&bad), Err(EnvError::EpisodeFinished));
    }

    #[test]
    fn redundant_arguments_are_dropped() {
        let a = Action {
            axiom: AxiomId::EIDI,
            args: vec![NodePath::statement(StmtRef::Premise(0)); 3],
            direction: Direction::Forward,
            mode: Mode::Forward,
        };
        assert_eq!(a.to_step().args.len(), 1);
    }
}
