//! PUCT Monte-Carlo tree search over the axiom space, with arguments
//! supplied by a pluggable policy.
//!
//! Each tree node stores the state reached and one edge per legal axiom;
//! an edge's concrete step is proposed once, when its parent is expanded.
//! A simulation descends by PUCT until it leaves the tree, evaluates the new
//! state (1 if proven, 0 at the step limit or a dead end, otherwise the value
//! function) and adds that value to every edge on the path.

mod candidates;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, RngCore};

use crate::axioms::{AxiomId, AxiomSet};
use crate::expr::Statement;
use crate::kernel::{apply_step, init_state, ProofState, ProofStep, Theorem};

pub use candidates::{candidate_steps, legal_steps, progress, sample_legal_step};

pub const N_AXIOMS: usize = AxiomId::ALL.len();

#[derive(Clone, Debug, PartialEq)]
pub struct MctsConfig {
    pub c_puct: f64,
    pub tau: f64,
    pub n_simulations: usize,
    pub step_limit: usize,
}

impl Default for MctsConfig {
    fn default() -> Self {
        MctsConfig { c_puct: 1.0, tau: 1.0, n_simulations: 200, step_limit: 15 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("no legal action")]
    NoLegalAction,
    #[error("root state is terminal")]
    TerminalRoot,
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

/// Supplies axiom priors and concrete arguments.
pub trait Policy {
    /// Prior over all axioms, indexed by [`AxiomId::index`].
    fn prior(&self, state: &ProofState) -> Vec<f64>;
    /// A concrete step for `axiom`, or `None` if it has no legal use here.
    fn propose(&self, state: &ProofState, axiom: AxiomId, rng: &mut dyn RngCore) -> Option<ProofStep>;
}

pub trait ValueFn {
    /// Estimated value in `[0, 1]`.
    fn value(&self, state: &ProofState) -> f64;
}

impl<F: Fn(&ProofState) -> f64> ValueFn for F {
    fn value(&self, state: &ProofState) -> f64 {
        self(state)
    }
}

/// 1 when proven, otherwise `max(0, 1 - open goal nodes / 50)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HeuristicValue;

impl ValueFn for HeuristicValue {
    fn value(&self, state: &ProofState) -> f64 {
        if state.proven() {
            return 1.0;
        }
        let open: usize = state.goals.iter().filter(|g| !state.knows(g)).map(Statement::node_count).sum();
        (1.0 - open as f64 / 50.0).max(0.0)
    }
}

fn uniform_over(set: AxiomSet) -> Vec<f64> {
    let axioms = set.axioms();
    let mut p = vec![0.0; N_AXIOMS];
    for a in axioms {
        p[a.index()] = 1.0 / axioms.len() as f64;
    }
    p
}

/// Uniform prior over the axiom set; arguments drawn uniformly from the
/// accepted, state-changing candidates.
#[derive(Clone, Copy, Debug)]
pub struct UniformPolicy {
    pub axiom_set: AxiomSet,
}

impl Default for UniformPolicy {
    fn default() -> Self {
        UniformPolicy { axiom_set: AxiomSet::OrderedField }
    }
}

impl Policy for UniformPolicy {
    fn prior(&self, _state: &ProofState) -> Vec<f64> {
        uniform_over(self.axiom_set)
    }

    fn propose(&self, state: &ProofState, axiom: AxiomId, rng: &mut dyn RngCore) -> Option<ProofStep> {
        sample_legal_step(state, axiom, rng)
    }
}

fn same_statements(a: &ProofState, b: &ProofState) -> bool {
    a.goals == b.goals && a.premises == b.premises && a.facts == b.facts
}

/// Peeks at a known proof: on states along it, puts `confidence` of the
/// prior on the next ground-truth axiom and proposes the ground-truth step.
/// Elsewhere it behaves like [`UniformPolicy`].
#[derive(Clone, Debug)]
pub struct OraclePolicy {
    states: Vec<ProofState>,
    proof: Vec<ProofStep>,
    pub confidence: f64,
    pub fallback: UniformPolicy,
}

impl OraclePolicy {
    pub fn new(theorem: &Theorem, proof: &[ProofStep], axiom_set: AxiomSet) -> Self {
        let mut states = Vec::with_capacity(proof.len());
        let mut s = init_state(theorem);
        for step in proof {
            states.push(s.clone());
            s = apply_step(&s, step).next_state;
        }
        OraclePolicy { states, proof: proof.to_vec(), confidence: 0.9, fallback: UniformPolicy { axiom_set } }
    }

    fn position(&self, state: &ProofState) -> Option<usize> {
        self.states.iter().position(|s| same_statements(s, state))
    }
}

impl Policy for OraclePolicy {
    fn prior(&self, state: &ProofState) -> Vec<f64> {
        let mut p = self.fallback.prior(state);
        if let Some(i) = self.position(state) {
            let target = self.proof[i].axiom.index();
            let rest = 1.0 - self.confidence;
            let others = p.iter().enumerate().filter(|(j, &x)| *j != target && x > 0.0).count().max(1);
            for (j, x) in p.iter_mut().enumerate() {
                if j == target {
                    *x = self.confidence;
                } else if *x > 0.0 {
                    *x = rest / others as f64;
                }
            }
        }
        p
    }

    fn propose(&self, state: &ProofState, axiom: AxiomId, rng: &mut dyn RngCore) -> Option<ProofStep> {
        match self.position(state) {
            Some(i) if self.proof[i].axiom == axiom => Some(self.proof[i].clone()),
            _ => self.fallback.propose(state, axiom, rng),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub axiom: AxiomId,
    pub step: ProofStep,
    pub prior: f64,
    pub visits: u32,
    pub value_sum: f64,
    child: Option<usize>,
}

impl Edge {
    pub fn new(axiom: AxiomId, step: ProofStep, prior: f64) -> Self {
        Edge { axiom, step, prior, visits: 0, value_sum: 0.0, child: None }
    }

    pub fn q(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.value_sum / self.visits as f64
        }
    }
}

/// Index of the edge maximizing `Q + c_puct * P * sqrt(sum N) / (1 + N)`;
/// the earliest edge wins ties.
pub fn select_edge(edges: &[Edge], c_puct: f64) -> Result<usize, SearchError> {
    let total: u32 = edges.iter().map(|e| e.visits).sum();
    let sqrt_total = (total as f64).sqrt();
    let mut best: Option<(usize, f64)> = None;
    for (i, e) in edges.iter().enumerate() {
        let score = e.q() + c_puct * e.prior * sqrt_total / (1.0 + e.visits as f64);
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i).ok_or(SearchError::NoLegalAction)
}

/// PUCT choice among edges listed in axiom-index order.
pub fn select_axiom(edges: &[Edge], cfg: &MctsConfig) -> Result<AxiomId, SearchError> {
    select_edge(edges, cfg.c_puct).map(|i| edges[i].axiom)
}

struct Node {
    state: ProofState,
    terminal: Option<f64>,
    edges: Vec<Edge>,
}

fn expand(state: &ProofState, policy: &dyn Policy, rng: &mut dyn RngCore) -> Vec<Edge> {
    let prior = policy.prior(state);
    let mut edges: Vec<Edge> = AxiomId::ALL
        .iter()
        .filter(|a| prior.get(a.index()).copied().unwrap_or(0.0) > 0.0)
        .filter_map(|&a| policy.propose(state, a, rng).map(|s| Edge::new(a, s, prior[a.index()])))
        .collect();
    let total: f64 = edges.iter().map(|e| e.prior).sum();
    if total > 0.0 {
        for e in &mut edges {
            e.prior /= total;
        }
    }
    edges
}

#[derive(Clone, Debug, PartialEq)]
pub struct MctsResult {
    /// Root edges, in axiom-index order.
    pub edges: Vec<Edge>,
    /// Root visit counts indexed by axiom.
    pub visits: Vec<u32>,
    /// `N^(1/tau)`, normalized, indexed by axiom.
    pub distribution: Vec<f64>,
}

impl MctsResult {
    pub fn top_axiom(&self) -> Option<AxiomId> {
        let mut best: Option<&Edge> = None;
        for e in &self.edges {
            if best.is_none_or(|b| e.visits > b.visits) {
                best = Some(e);
            }
        }
        best.map(|e| e.axiom)
    }

    pub fn step_for(&self, axiom: AxiomId) -> Option<&ProofStep> {
        self.edges.iter().find(|e| e.axiom == axiom).map(|e| &e.step)
    }
}

pub fn run_mcts<R: Rng + ?Sized>(
    root: &ProofState,
    policy: &dyn Policy,
    value_fn: &dyn ValueFn,
    cfg: &MctsConfig,
    rng: &mut R,
) -> Result<MctsResult, SearchError> {
    if cfg.n_simulations == 0 || !(cfg.tau > 0.0) {
        return Err(SearchError::InvalidConfig("need n_simulations >= 1 and tau > 0".into()));
    }
    if root.proven() || root.steps_taken >= cfg.step_limit {
        return Err(SearchError::TerminalRoot);
    }
    let mut rng = RngAdapter(rng);
    let root_edges = expand(root, policy, &mut rng);
    if root_edges.is_empty() {
        return Err(SearchError::NoLegalAction);
    }
    let mut nodes = vec![Node { state: root.clone(), terminal: None, edges: root_edges }];

    for _ in 0..cfg.n_simulations {
        let mut at = 0;
        let mut path: Vec<(usize, usize)> = Vec::new();
        let value = loop {
            if let Some(v) = nodes[at].terminal {
                break v;
            }
            let ei = select_edge(&nodes[at].edges, cfg.c_puct).expect("non-terminal nodes have edges");
            path.push((at, ei));
            if let Some(child) = nodes[at].edges[ei].child {
                at = child;
                continue;
            }
            let r = apply_step(&nodes[at].state, &nodes[at].edges[ei].step);
            let state = r.next_state;
            let (terminal, edges, v) = if r.proven {
                (Some(1.0), Vec::new(), 1.0)
            } else if state.steps_taken >= cfg.step_limit {
                (Some(0.0), Vec::new(), 0.0)
            } else {
                let edges = expand(&state, policy, &mut rng);
                if edges.is_empty() {
                    (Some(0.0), edges, 0.0)
                } else {
                    let v = value_fn.value(&state).clamp(0.0, 1.0);
                    (None, edges, v)
                }
            };
            let id = nodes.len();
            nodes.push(Node { state, terminal, edges });
            nodes[at].edges[ei].child = Some(id);
            break v;
        };
        for (n, e) in path {
            let edge = &mut nodes[n].edges[e];
            edge.visits += 1;
            edge.value_sum += value;
        }
    }

    let root = nodes.swap_remove(0);
    let mut visits = vec![0u32; N_AXIOMS];
    for e in &root.edges {
        visits[e.axiom.index()] = e.visits;
    }
    let weights: Vec<f64> = visits.iter().map(|&n| (n as f64).powf(1.0 / cfg.tau)).collect();
    let total: f64 = weights.iter().sum();
    let distribution = weights.iter().map(|w| if total > 0.0 { w / total } else { 0.0 }).collect();
    Ok(MctsResult { edges: root.edges, visits, distribution })
}

/// Lets a generic `Rng` be passed where the policy expects `dyn RngCore`.
struct RngAdapter<'a, R: ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for RngAdapter<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// Searches from each state in turn, commits an axiom sampled from the
/// visit distribution with the step proposed for it, and stops when proven
/// or at the step limit.
pub fn prove<R: Rng + ?Sized>(
    theorem: &Theorem,
    policy: &dyn Policy,
    value_fn: &dyn ValueFn,
    cfg: &MctsConfig,
    rng: &mut R,
) -> Option<Vec<ProofStep>> {
    let mut state = init_state(theorem);
    let mut proof = Vec::new();
    if state.proven() {
        return Some(proof);
    }
    while state.steps_taken < cfg.step_limit {
        let res = run_mcts(&state, policy, value_fn, cfg, rng).ok()?;
        let pick = WeightedIndex::new(&res.distribution).ok()?.sample(rng);
        let step = res.step_for(AxiomId::ALL[pick])?.clone();
        let r = apply_step(&state, &step);
        proof.push(step);
        state = r.next_state;
        if r.proven {
            return Some(proof);
        }
    }
    None
}

/// No search: at each state take the highest-prior axiom that has a legal
/// proposal (lowest index on ties).
pub fn greedy<R: Rng + ?Sized>(
    theorem: &Theorem,
    policy: &dyn Policy,
    step_limit: usize,
    rng: &mut R,
) -> Option<Vec<ProofStep>> {
    let mut rng = RngAdapter(rng);
    let mut state = init_state(theorem);
    let mut proof = Vec::new();
    while !state.proven() {
        if state.steps_taken >= step_limit {
            return None;
        }
        let prior = policy.prior(&state);
        let mut order: Vec<AxiomId> = AxiomId::ALL.iter().copied().filter(|a| prior[a.index()] > 0.0).collect();
        order.sort_by(|a, b| prior[b.index()].total_cmp(&prior[a.index()]).then(a.index().cmp(&b.index())));
        let step = order.iter().find_map(|&a| policy.propose(&state, a, &mut rng))?;
        state = apply_step(&state, &step).next_state;
        proof.push(step);
    }
    Some(proof)
}
