//! Theorem generation: grow a trivial statement `X=X` through an axiom order
//! and emit a proof the kernel can replay.
//!
//! Generated proofs run forward. The first core statement is a premise, each
//! transformation becomes a rewrite inside the previous core (adding the new
//! core as a fact) and each extension becomes a statement-form step whose
//! first argument is the previous core. The goal is closed when the last
//! step adds it to the facts.

mod initial;
mod order;
mod split;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::axioms::{self, AxiomId, AxiomSet, Direction, ExtensionTrace};
use crate::expr::path::replace_in_statement;
use crate::expr::{
    enumerate_statement_nodes, Entity, NodePath, Rel, Side, Statement, StatementScope, DEFAULT_ALPHABET,
};
use crate::kernel::{apply_step, init_state, Mode, ProofStep, Theorem};

pub use initial::{count_entities, initial_conditions, sample_entity, sample_initial_condition};
pub use order::{order_is_feasible, sample_axiom_order, sample_order_from};
pub use split::{generate_split, Dimension, Split, SplitSpec, TrainStream};

pub const DEFAULT_MAX_RETRIES: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no feasible axiom order with K={k}, L={l}")]
    InfeasibleOrder { k: usize, l: usize },
    #[error("{axiom} neither transforms nor extends the core statement")]
    MorphFailed { axiom: AxiomId },
    #[error("generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("could not fill the split: {0}")]
    PoolExhausted(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub axiom_set: AxiomSet,
    pub k: usize,
    pub l: usize,
    pub degree: usize,
    pub seed: u64,
    pub max_retries: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            axiom_set: AxiomSet::OrderedField,
            k: 3,
            l: 3,
            degree: 0,
            seed: 0,
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }
}

impl GeneratorConfig {
    pub fn new(axiom_set: AxiomSet, k: usize, l: usize) -> Self {
        GeneratorConfig { axiom_set, k, l, ..Default::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.k == 0 {
            return Err(GenError::InvalidConfig("K must be at least 1".into()));
        }
        if self.k > self.l {
            return Err(GenError::InvalidConfig(format!("K={} exceeds L={}", self.k, self.l)));
        }
        if self.k > self.axiom_set.axioms().len() {
            return Err(GenError::InvalidConfig(format!("K={} exceeds the axiom set", self.k)));
        }
        if self.max_retries == 0 {
            return Err(GenError::InvalidConfig("max_retries must be positive".into()));
        }
        Ok(())
    }
}

/// How a transformation or extension changed the core statement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphKind {
    Transform { side: Side, path: Vec<u8> },
    Extend(ExtensionTrace),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morph {
    pub axiom: AxiomId,
    pub before: Statement,
    pub after: Statement,
    /// Premises introduced by this step (including nonzero side conditions).
    pub new_premises: Vec<Statement>,
    pub kind: MorphKind,
}

/// One application of `axiom` to `core`: a transformation at a uniformly
/// chosen matching node if there is one, otherwise an extension.
pub fn morph<R: Rng + ?Sized>(
    axiom: AxiomId,
    core: &Statement,
    pool: &[Entity],
    rng: &mut R,
) -> Result<(Statement, Vec<Statement>), GenError> {
    morph_traced(axiom, core, pool, rng).map(|m| (m.after, m.new_premises))
}

pub fn morph_traced<R: Rng + ?Sized>(
    axiom: AxiomId,
    core: &Statement,
    pool: &[Entity],
    rng: &mut R,
) -> Result<Morph, GenError> {
    let failed = || GenError::MorphFailed { axiom };
    if axiom.spec().has_transformation {
        let matching: Vec<(Side, Vec<u8>, &Entity)> = enumerate_statement_nodes(core)
            .into_iter()
            .filter(|(_, _, e)| matches!(axioms::match_transform(axiom, e, Direction::Forward), Ok(Some(_))))
            .collect();
        if let Some((side, path, node)) = matching.choose(rng) {
            let (out, side_conditions) =
                axioms::rewrite_with_conditions(axiom, node, Direction::Forward).map_err(|_| failed())?;
            let after = replace_in_statement(core, *side, path, out).ok_or_else(failed)?;
            return Ok(Morph {
                axiom,
                before: core.clone(),
                after,
                new_premises: side_conditions,
                kind: MorphKind::Transform { side: *side, path: path.clone() },
            });
        }
    }
    let trace = axioms::extend_traced(axiom, core, pool, rng).map_err(|_| failed())?;
    Ok(Morph {
        axiom,
        before: core.clone(),
        after: trace.conclusion.clone(),
        new_premises: trace.new_premises.clone(),
        kind: MorphKind::Extend(trace),
    })
}

/// Extension pool: every subterm of the core and of the premises so far,
/// positionally (duplicates kept), plus one leaf per alphabet variable.
fn node_pool(core: &Statement, premises: &[Statement]) -> Vec<Entity> {
    let mut pool: Vec<Entity> = Vec::new();
    for stmt in std::iter::once(core).chain(premises) {
        pool.extend(enumerate_statement_nodes(stmt).into_iter().map(|(_, _, e)| e.clone()));
    }
    pool.extend(DEFAULT_ALPHABET.iter().map(|&v| Entity::var(v)));
    pool
}

/// A premise that can never hold, such as `0!=0`.
fn unsatisfiable(s: &Statement) -> bool {
    s.rel == Rel::Neq && s.lhs == s.rhs
}

/// Runs the generation loop once. `None` means this attempt failed and
/// should be retried with further randomness.
fn attempt<R: Rng + ?Sized>(
    initial: &[Statement],
    order: &[AxiomId],
    rng: &mut R,
) -> Result<Option<(Theorem, Vec<Morph>)>, GenError> {
    let c0 = initial.choose(rng).ok_or_else(|| GenError::InvalidConfig("no initial conditions".into()))?.clone();
    let mut premises = vec![c0.clone()];
    let mut core = c0.clone();
    let mut trace = Vec::with_capacity(order.len());
    for &axiom in order {
        let pool = node_pool(&core, &premises);
        let m = match morph_traced(axiom, &core, &pool, rng) {
            Ok(m) => m,
            Err(GenError::MorphFailed { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        for p in &m.new_premises {
            if unsatisfiable(p) {
                return Ok(None);
            }
            if !premises.contains(p) {
                premises.push(p.clone());
            }
        }
        core = m.after.clone();
        trace.push(m);
    }
    if core.is_reflexive() || premises.contains(&core) {
        return Ok(None);
    }
    let mut theorem = Theorem::new(core, premises);
    theorem.meta.initial_condition = Some(c0);
    match synthesize_proof(&theorem, &trace) {
        Some(proof) => {
            theorem.proof = Some(proof);
            Ok(Some((theorem, trace)))
        }
        None => Ok(None),
    }
}

/// Turns a morph trace into kernel steps, replaying each one. Returns `None`
/// if any step is rejected or leaves the state unchanged, the goal closes
/// early, or it never closes.
pub fn synthesize_proof(theorem: &Theorem, trace: &[Morph]) -> Option<Vec<ProofStep>> {
    let mut state = init_state(theorem);
    let mut proof = Vec::with_capacity(trace.len());
    for (i, m) in trace.iter().enumerate() {
        let at = state.find_statement(&m.before)?;
        let step = match &m.kind {
            MorphKind::Transform { side, path } => ProofStep::new(m.axiom, vec![NodePath::node(at, *side, path.clone())]),
            MorphKind::Extend(t) => {
                let rule = axioms::rule_for(m.axiom, t.direction);
                let extra = rule.arg_premises.len() - 1;
                let mut args = vec![NodePath::statement(at)];
                for p in &t.new_premises[..extra] {
                    args.push(NodePath::statement(state.find_statement(p)?));
                }
                for e in &t.samples {
                    args.push(state.find_entity(e)?);
                }
                ProofStep { axiom: m.axiom, args, direction: t.direction, mode: Mode::Forward }
            }
        };
        let r = apply_step(&state, &step);
        let changed = r.next_state.goals != state.goals || r.next_state.facts != state.facts;
        if !r.accepted || !changed || (r.proven && i + 1 < trace.len()) {
            return None;
        }
        state = r.next_state;
        proof.push(step);
    }
    state.proven().then_some(proof)
}

/// Generates one theorem from a fixed order, retrying with fresh randomness
/// up to `max_retries` times.
pub fn generate_theorem<R: Rng + ?Sized>(
    initial: &[Statement],
    order: &[AxiomId],
    rng: &mut R,
) -> Result<Theorem, GenError> {
    generate_theorem_with_retries(initial, order, rng, DEFAULT_MAX_RETRIES)
}

pub fn generate_theorem_with_retries<R: Rng + ?Sized>(
    initial: &[Statement],
    order: &[AxiomId],
    rng: &mut R,
    max_retries: usize,
) -> Result<Theorem, GenError> {
    generate_traced(initial, order, rng, max_retries).map(|(t, _)| t)
}

/// Like [`generate_theorem`], also returning the morph trace.
pub fn generate_traced<R: Rng + ?Sized>(
    initial: &[Statement],
    order: &[AxiomId],
    rng: &mut R,
    max_retries: usize,
) -> Result<(Theorem, Vec<Morph>), GenError> {
    if order.is_empty() {
        return Err(GenError::InvalidConfig("empty axiom order".into()));
    }
    for _ in 0..max_retries.max(1) {
        if let Some((mut theorem, trace)) = attempt(initial, order, rng)? {
            theorem.meta.l = order.len();
            theorem.meta.axiom_order = order.to_vec();
            let mut distinct = order.to_vec();
            distinct.sort();
            distinct.dedup();
            theorem.meta.k = distinct.len();
            return Ok((theorem, trace));
        }
    }
    Err(GenError::GenerationFailed { attempts: max_retries.max(1) })
}

/// Where the axiom orders of a batch come from.
#[derive(Clone, Debug)]
pub(crate) enum OrderSource {
    Random { axiom_set: AxiomSet, k: usize, l: usize },
    Pool(Vec<Vec<AxiomId>>),
    Combinations { axiom_set: AxiomSet, combos: Vec<Vec<AxiomId>>, l: usize },
}

impl OrderSource {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<AxiomId>, GenError> {
        match self {
            OrderSource::Random { axiom_set, k, l } => sample_axiom_order(*k, *l, *axiom_set, rng),
            OrderSource::Pool(orders) => {
                orders.choose(rng).cloned().ok_or_else(|| GenError::PoolExhausted("empty order pool".into()))
            }
            OrderSource::Combinations { axiom_set, combos, l } => {
                let combo = combos.choose(rng).ok_or_else(|| GenError::PoolExhausted("empty combination pool".into()))?;
                sample_order_from(combo, *l, *axiom_set, rng)
            }
        }
    }
}

/// Everything needed to generate theorem number `i` of a stream.
#[derive(Clone, Debug)]
pub(crate) struct Recipe {
    pub orders: OrderSource,
    pub degrees: Vec<usize>,
    pub max_retries: usize,
}

impl Recipe {
    pub(crate) fn from_config(config: &GeneratorConfig) -> Self {
        Recipe {
            orders: OrderSource::Random { axiom_set: config.axiom_set, k: config.k, l: config.l },
            degrees: vec![config.degree],
            max_retries: config.max_retries,
        }
    }

    /// Generates a theorem from its own seed, resampling the order and the
    /// initial condition whenever a whole order fails.
    pub(crate) fn generate(&self, seed: u64) -> Result<Theorem, GenError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut last = GenError::GenerationFailed { attempts: 0 };
        for _ in 0..self.max_retries {
            let order = self.orders.sample(&mut rng)?;
            let degree = *self.degrees.choose(&mut rng).unwrap_or(&0);
            let initial = initial_conditions(degree, &mut rng);
            match generate_theorem_with_retries(&initial, &order, &mut rng, self.max_retries) {
                Ok(mut t) => {
                    t.meta.degree = degree;
                    t.meta.seed = seed;
                    return Ok(t);
                }
                Err(e @ GenError::GenerationFailed { .. }) => last = e,
                Err(e) => return Err(e),
            }
        }
        Err(last)
    }
}

/// Seed of theorem `index` in a stream with base `seed`.
pub fn theorem_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// Execution strategy for batch generation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    /// Data-parallel over theorems (sequential when built without the
    /// `parallel` feature).
    #[default]
    Parallel,
    Sequential,
}

pub(crate) fn map_indices<T, F>(exec: Exec, range: std::ops::Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            range.into_par_iter().map(f).collect()
        }
        _ => range.map(f).collect(),
    }
}

/// Theorem `index` of the stream described by `config`.
pub fn generate_one(config: &GeneratorConfig, index: u64) -> Result<Theorem, GenError> {
    config.validate()?;
    Recipe::from_config(config).generate(theorem_seed(config.seed, index))
}

pub fn generate_batch(config: &GeneratorConfig, n: usize) -> Result<Vec<Theorem>, GenError> {
    generate_batch_with(config, n, Exec::default())
}

/// `n` theorems in index order; the output does not depend on `exec`.
pub fn generate_batch_with(config: &GeneratorConfig, n: usize, exec: Exec) -> Result<Vec<Theorem>, GenError> {
    config.validate()?;
    let recipe = Recipe::from_config(config);
    map_indices(exec, 0..n as u64, |i| recipe.generate(theorem_seed(config.seed, i))).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_statement;
    use crate::kernel::verify;

    fn st(s: &str) -> Statement {
        parse_statement(s).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(GeneratorConfig::new(AxiomSet::Field, 3, 2).validate().is_err());
        assert!(GeneratorConfig::new(AxiomSet::Field, 0, 2).validate().is_err());
        assert!(GeneratorConfig::new(AxiomSet::Field, 14, 20).validate().is_err());
        assert!(GeneratorConfig::new(AxiomSet::OrderedField, 4, 4).validate().is_ok());
    }

    #[test]
    fn morph_extends_when_nothing_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pool = vec![Entity::var('b')];
        let (c, p) = morph(AxiomId::AA, &st("a=a"), &pool, &mut rng).unwrap();
        assert_eq!(c, st("(a+(b+b))=((a+b)+b)"));
        assert!(p.is_empty());
    }

    #[test]
    fn morph_transforms_a_matching_node() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let core = st("((a+b)+c)=(a+(b+c))");
        for _ in 0..20 {
            let m = morph_traced(AxiomId::AC, &core, &[], &mut rng).unwrap();
            assert!(matches!(m.kind, MorphKind::Transform { .. }));
            assert!(m.new_premises.is_empty());
            let candidates = [
                st("(c+(a+b))=(a+(b+c))"),
                st("((b+a)+c)=(a+(b+c))"),
                st("((a+b)+c)=((b+c)+a)"),
                st("((a+b)+c)=(a+(c+b))"),
            ];
            assert!(candidates.contains(&m.after), "{}", m.after);
        }
    }

    #[test]
    fn morph_reports_failure_on_wrong_core() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(
            morph(AxiomId::IMT, &st("a=a"), &[Entity::var('a')], &mut rng),
            Err(GenError::MorphFailed { axiom: AxiomId::IMT })
        );
        assert!(morph(AxiomId::EMT, &st("a=a"), &[Entity::var('a')], &mut rng).is_err());
    }

    #[test]
    fn multiplication_simplification_transform_emits_nonzero_premise() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (c, p) = morph(AxiomId::MS, &st("(a*(1/a))=b"), &[], &mut rng).unwrap();
        assert_eq!(c, st("1=b"));
        assert_eq!(p, vec![st("a!=0")]);
    }

    #[test]
    fn generated_theorems_verify_with_exact_shape() {
        for (set, k, l) in [(AxiomSet::Field, 2, 3), (AxiomSet::OrderedField, 3, 5), (AxiomSet::OrderedField, 2, 2)] {
            let cfg = GeneratorConfig::new(set, k, l).with_seed(11);
            for t in generate_batch_with(&cfg, 20, Exec::Sequential).unwrap() {
                let proof = t.proof.clone().unwrap();
                assert_eq!(proof.len(), l);
                assert_eq!(t.meta.k, k);
                assert!(verify(&t, &proof), "{}", t.goal);
                if set == AxiomSet::OrderedField {
                    assert_ne!(t.goal.rel, Rel::Eq);
                }
            }
        }
    }

    #[test]
    fn batches_are_deterministic_across_execution_modes() {
        let cfg = GeneratorConfig::new(AxiomSet::OrderedField, 3, 4).with_seed(5);
        let a = generate_batch_with(&cfg, 16, Exec::Sequential).unwrap();
        let b = generate_batch_with(&cfg, 16, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(generate_one(&cfg, 7).unwrap(), a[7]);
    }

    #[test]
    fn truncating_a_generated_proof_breaks_it() {
        let cfg = GeneratorConfig::new(AxiomSet::Field, 2, 4).with_seed(9);
        for t in generate_batch(&cfg, 10).unwrap() {
            let proof = t.proof.clone().unwrap();
            assert!(!verify(&t, &proof[..proof.len() - 1]));
        }
    }
}
