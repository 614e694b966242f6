use std::collections::BTreeMap;

use serde::Serialize;

use crate::axioms::AxiomId;
use crate::env::node_count;
use crate::kernel::{apply_step, init_state, Theorem};

/// Width of a theorem-length histogram bucket, in characters.
pub const LENGTH_BUCKET: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("dataset is empty")]
pub struct EmptyDataset;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomCount {
    pub axiom: AxiomId,
    pub count: usize,
    pub percent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsReport {
    pub theorems: usize,
    pub proof_steps: usize,
    /// Bucket lower bound (characters) to count.
    pub length_histogram: BTreeMap<usize, usize>,
    /// Most frequent first; ties by axiom order.
    pub axiom_frequency: Vec<AxiomCount>,
    /// Mean over each proof's replay states of the node count, averaged per L.
    pub mean_nodes_by_l: BTreeMap<usize, f64>,
    pub mean_length_by_l: BTreeMap<usize, f64>,
    /// Keyed `K<k>L<l>`.
    pub counts_by_kl: BTreeMap<String, usize>,
}

impl StatsReport {
    pub fn rank(&self, axiom: AxiomId) -> Option<usize> {
        self.axiom_frequency.iter().position(|c| c.axiom == axiom)
    }

    pub fn count(&self, axiom: AxiomId) -> usize {
        self.axiom_frequency.iter().find(|c| c.axiom == axiom).map_or(0, |c| c.count)
    }
}

/// Mean node count over the states a proof passes through.
pub fn mean_proof_nodes(t: &Theorem) -> f64 {
    let mut state = init_state(t);
    let mut total = node_count(&state);
    let mut states = 1;
    for step in t.proof.iter().flatten() {
        state = apply_step(&state, step).next_state;
        total += node_count(&state);
        states += 1;
    }
    total as f64 / states as f64
}

/// Streaming form of [`compute_stats`].
#[derive(Clone, Debug, Default)]
pub struct StatsAccumulator {
    theorems: usize,
    proof_steps: usize,
    histogram: BTreeMap<usize, usize>,
    axioms: [usize; AxiomId::ALL.len()],
    nodes: BTreeMap<usize, (f64, usize)>,
    lengths: BTreeMap<usize, (usize, usize)>,
    kl: BTreeMap<String, usize>,
}

impl StatsAccumulator {
    pub fn push(&mut self, t: &Theorem) {
        self.theorems += 1;
        let len = t.text_len();
        *self.histogram.entry(len / LENGTH_BUCKET * LENGTH_BUCKET).or_default() += 1;
        for step in t.proof.iter().flatten() {
            self.axioms[step.axiom.index()] += 1;
            self.proof_steps += 1;
        }
        let l = t.meta.l;
        let n = self.nodes.entry(l).or_default();
        n.0 += mean_proof_nodes(t);
        n.1 += 1;
        let c = self.lengths.entry(l).or_default();
        c.0 += len;
        c.1 += 1;
        *self.kl.entry(format!("K{}L{}", t.meta.k, l)).or_default() += 1;
    }

    pub fn finish(self) -> Result<StatsReport, EmptyDataset> {
        if self.theorems == 0 {
            return Err(EmptyDataset);
        }
        let steps = self.proof_steps.max(1) as f64;
        let mut axiom_frequency: Vec<AxiomCount> = AxiomId::ALL
            .iter()
            .map(|&axiom| {
                let count = self.axioms[axiom.index()];
                AxiomCount { axiom, count, percent: 100.0 * count as f64 / steps }
            })
            .collect();
        axiom_frequency.sort_by(|a, b| b.count.cmp(&a.count).then(a.axiom.cmp(&b.axiom)));
        Ok(StatsReport {
            theorems: self.theorems,
            proof_steps: self.proof_steps,
            length_histogram: self.histogram,
            axiom_frequency,
            mean_nodes_by_l: self.nodes.into_iter().map(|(l, (s, n))| (l, s / n as f64)).collect(),
            mean_length_by_l: self.lengths.into_iter().map(|(l, (s, n))| (l, s as f64 / n as f64)).collect(),
            counts_by_kl: self.kl,
        })
    }
}

pub fn compute_stats(theorems: &[Theorem]) -> Result<StatsReport, EmptyDataset> {
    let mut acc = StatsAccumulator::default();
    for t in theorems {
        acc.push(t);
    }
    acc.finish()
}
