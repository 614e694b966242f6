//! Axiom-order sampling with symbolic feasibility screening.

use rand::seq::index::sample;
use rand::Rng;

use crate::axioms::{AxiomId, AxiomSet};

use super::GenError;

pub(crate) const ORDER_ATTEMPTS: usize = 200_000;

#[derive(Clone, Copy, PartialEq, Eq)]
enum CoreRel {
    Equality,
    Inequality,
}

/// Dry run tracking only the relation of the core statement.
///
/// Equality cores accept everything except the inequality-only axioms
/// (IMT, FPOI, SPOI); EIDI and SGEQZ turn the core into an inequality.
/// Inequality cores accept IMT, FPOI, SPOI and the axioms with a
/// transformation rule. Ordered-field orders must end on an inequality.
pub fn order_is_feasible(order: &[AxiomId], axiom_set: AxiomSet) -> bool {
    if order.iter().any(|a| !axiom_set.axioms().contains(a)) {
        return false;
    }
    let mut rel = CoreRel::Equality;
    for &a in order {
        rel = match (rel, a) {
            (CoreRel::Equality, AxiomId::IMT | AxiomId::FPOI | AxiomId::SPOI) => return false,
            (CoreRel::Equality, AxiomId::EIDI | AxiomId::SGEQZ) => CoreRel::Inequality,
            (CoreRel::Equality, _) => CoreRel::Equality,
            (CoreRel::Inequality, AxiomId::IMT | AxiomId::FPOI | AxiomId::SPOI) => CoreRel::Inequality,
            (CoreRel::Inequality, a) if a.spec().has_transformation => CoreRel::Inequality,
            (CoreRel::Inequality, _) => return false,
        };
    }
    match axiom_set {
        AxiomSet::Field => true,
        AxiomSet::OrderedField => rel == CoreRel::Inequality,
    }
}

/// Fills `l` slots uniformly from `combo` until every axiom appears and the
/// order is feasible.
pub(crate) fn fill_order<R: Rng + ?Sized>(
    combo: &[AxiomId],
    l: usize,
    axiom_set: AxiomSet,
    rng: &mut R,
    attempts: usize,
) -> Option<Vec<AxiomId>> {
    if combo.is_empty() || combo.len() > l {
        return None;
    }
    for _ in 0..attempts {
        let order: Vec<AxiomId> = (0..l).map(|_| combo[rng.gen_range(0..combo.len())]).collect();
        if combo.iter().all(|a| order.contains(a)) && order_is_feasible(&order, axiom_set) {
            return Some(order);
        }
    }
    None
}

pub fn sample_order_from<R: Rng + ?Sized>(
    combo: &[AxiomId],
    l: usize,
    axiom_set: AxiomSet,
    rng: &mut R,
) -> Result<Vec<AxiomId>, GenError> {
    fill_order(combo, l, axiom_set, rng, ORDER_ATTEMPTS).ok_or(GenError::InfeasibleOrder { k: combo.len(), l })
}

pub(crate) fn sample_combination<R: Rng + ?Sized>(k: usize, axiom_set: AxiomSet, rng: &mut R) -> Vec<AxiomId> {
    let axioms = axiom_set.axioms();
    let mut combo: Vec<AxiomId> = sample(rng, axioms.len(), k).into_iter().map(|i| axioms[i]).collect();
    combo.sort();
    combo
}

/// A length-`l` order with exactly `k` distinct axioms: choose `k` axioms
/// uniformly, fill the slots uniformly from them, and reject until every
/// chosen axiom appears and the order passes screening.
pub fn sample_axiom_order<R: Rng + ?Sized>(
    k: usize,
    l: usize,
    axiom_set: AxiomSet,
    rng: &mut R,
) -> Result<Vec<AxiomId>, GenError> {
    if k == 0 || k > l || k > axiom_set.axioms().len() {
        return Err(GenError::InvalidConfig(format!("cannot draw K={k} distinct axioms into L={l} slots")));
    }
    for _ in 0..ORDER_ATTEMPTS {
        let combo = sample_combination(k, axiom_set, rng);
        if let Some(order) = fill_order(&combo, l, axiom_set, rng, 1) {
            return Ok(order);
        }
    }
    Err(GenError::InfeasibleOrder { k, l })
}
