//! Train/test splits along the six generalization dimensions.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::axioms::AxiomId;
use crate::kernel::Theorem;

use super::order::{fill_order, sample_combination};
use super::{map_indices, theorem_seed, Exec, GenError, GeneratorConfig, OrderSource, Recipe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dimension {
    Iid,
    Degree,
    Orders,
    Combinations,
    KShift,
    LShift,
}

impl Dimension {
    pub const ALL: [Dimension; 6] = [
        Dimension::Iid,
        Dimension::Degree,
        Dimension::Orders,
        Dimension::Combinations,
        Dimension::KShift,
        Dimension::LShift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Iid => "iid",
            Dimension::Degree => "degree",
            Dimension::Orders => "orders",
            Dimension::Combinations => "combinations",
            Dimension::KShift => "k-shift",
            Dimension::LShift => "l-shift",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Dimension::ALL
            .into_iter()
            .find(|d| d.name() == norm || d.name().replace('-', "") == norm)
            .ok_or_else(|| format!("unknown split dimension {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSpec {
    pub dimension: Dimension,
    pub test_size: usize,
    /// Distinct orders in the training pool (`orders` dimension).
    pub n_orders: usize,
    /// Distinct held-out orders the test set draws from.
    pub n_test_orders: usize,
    /// Distinct combinations in the training pool (`combinations` dimension).
    pub n_combinations: usize,
    pub n_test_combinations: usize,
    /// Initial-condition degrees of the test set (`degree` dimension).
    pub test_degrees: Vec<usize>,
    /// Test K (`k-shift`); defaults to the training K plus one.
    pub test_k: Option<usize>,
    /// Test L (`l-shift`); defaults to the training L plus two.
    pub test_l: Option<usize>,
}

impl SplitSpec {
    pub fn new(dimension: Dimension) -> Self {
        SplitSpec {
            dimension,
            test_size: 1000,
            n_orders: 100,
            n_test_orders: 1000,
            n_combinations: 25,
            n_test_combinations: 300,
            test_degrees: vec![1, 2],
            test_k: None,
            test_l: None,
        }
    }

    pub fn with_test_size(mut self, n: usize) -> Self {
        self.test_size = n;
        self
    }
}

/// Generated test set plus an on-demand training stream. Pools are empty
/// for dimensions that do not use them.
pub struct Split {
    pub spec: SplitSpec,
    pub test: Vec<Theorem>,
    pub train: TrainStream,
    pub train_orders: Vec<Vec<AxiomId>>,
    pub test_orders: Vec<Vec<AxiomId>>,
    pub train_combinations: Vec<Vec<AxiomId>>,
    pub test_combinations: Vec<Vec<AxiomId>>,
}

/// Training theorems, regenerated whenever one collides with the test set.
pub struct TrainStream {
    recipe: Recipe,
    seed: u64,
    next: u64,
    test_keys: HashSet<String>,
    max_retries: usize,
}

impl TrainStream {
    fn theorem(&self, index: u64) -> Result<Theorem, GenError> {
        let base = theorem_seed(self.seed, index);
        for attempt in 0..self.max_retries as u64 {
            let seed = if attempt == 0 { base } else { theorem_seed(base, attempt) };
            let t = self.recipe.generate(seed)?;
            if !self.test_keys.contains(&t.canonical_key()) {
                return Ok(t);
            }
        }
        Err(GenError::PoolExhausted(format!("train theorem {index} kept colliding with the test set")))
    }

    /// The next `n` training theorems.
    pub fn next_batch(&mut self, n: usize, exec: Exec) -> Result<Vec<Theorem>, GenError> {
        let start = self.next;
        self.next += n as u64;
        let this = &*self;
        map_indices(exec, start..start + n as u64, |i| this.theorem(i)).into_iter().collect()
    }

    pub fn is_test_key(&self, key: &str) -> bool {
        self.test_keys.contains(key)
    }
}

impl Iterator for TrainStream {
    type Item = Result<Theorem, GenError>;

    fn next(&mut self) -> Option<Self::Item> {
        let i = self.next;
        self.next += 1;
        Some(self.theorem(i))
    }
}

const POOL_STREAM: u64 = u64::MAX;
const TEST_STREAM: u64 = u64::MAX - 1;
const TRAIN_STREAM: u64 = u64::MAX - 2;

fn distinct<T: Clone + Eq + std::hash::Hash>(
    wanted: usize,
    max_draws: usize,
    mut draw: impl FnMut() -> Result<Option<T>, GenError>,
) -> Result<Vec<T>, GenError> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(wanted);
    for _ in 0..max_draws {
        if out.len() == wanted {
            break;
        }
        if let Some(x) = draw()? {
            if seen.insert(x.clone()) {
                out.push(x);
            }
        }
    }
    if out.len() < wanted {
        return Err(GenError::PoolExhausted(format!("found {} of {wanted} distinct pool entries", out.len())));
    }
    Ok(out)
}

fn test_set(recipe: &Recipe, seed: u64, size: usize) -> Result<Vec<Theorem>, GenError> {
    let mut keys = HashSet::new();
    let mut out = Vec::with_capacity(size);
    let mut next = 0u64;
    let limit = 20 * size as u64 + 100;
    while out.len() < size {
        if next >= limit {
            return Err(GenError::PoolExhausted(format!("only {} distinct test theorems", out.len())));
        }
        let chunk = (size - out.len()).max(16) as u64;
        let batch = map_indices(Exec::default(), next..next + chunk, |i| recipe.generate(theorem_seed(seed, i)));
        next += chunk;
        for t in batch {
            let t = t?;
            if out.len() < size && keys.insert(t.canonical_key()) {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// Builds the fixed test set first, then a training stream that never emits
/// a theorem whose canonical goal-and-premises string is in the test set.
pub fn generate_split(spec: &SplitSpec, base: &GeneratorConfig) -> Result<Split, GenError> {
    base.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(theorem_seed(base.seed, POOL_STREAM));
    let mut train_recipe = Recipe::from_config(base);
    let mut test_recipe = train_recipe.clone();
    let (mut train_orders, mut test_orders) = (Vec::new(), Vec::new());
    let (mut train_combinations, mut test_combinations) = (Vec::new(), Vec::new());

    match spec.dimension {
        Dimension::Iid => {}
        Dimension::Degree => {
            if spec.test_degrees.is_empty() {
                return Err(GenError::InvalidConfig("degree split needs test degrees".into()));
            }
            test_recipe.degrees = spec.test_degrees.clone();
        }
        Dimension::Orders => {
            let total = spec.n_orders + spec.n_test_orders;
            let mut orders = distinct(total, 50 * total + 1000, || {
                super::sample_axiom_order(base.k, base.l, base.axiom_set, &mut rng).map(Some)
            })?;
            test_orders = orders.split_off(spec.n_orders);
            train_orders = orders;
            train_recipe.orders = OrderSource::Pool(train_orders.clone());
            test_recipe.orders = OrderSource::Pool(test_orders.clone());
        }
        Dimension::Combinations => {
            let total = spec.n_combinations + spec.n_test_combinations;
            let mut combos = distinct(total, 50 * total + 1000, || {
                let combo = sample_combination(base.k, base.axiom_set, &mut rng);
                Ok(fill_order(&combo, base.l, base.axiom_set, &mut rng, 10_000).map(|_| combo))
            })?;
            test_combinations = combos.split_off(spec.n_combinations);
            train_combinations = combos;
            train_recipe.orders = OrderSource::Combinations {
                axiom_set: base.axiom_set,
                combos: train_combinations.clone(),
                l: base.l,
            };
            test_recipe.orders = OrderSource::Combinations {
                axiom_set: base.axiom_set,
                combos: test_combinations.clone(),
                l: base.l,
            };
        }
        Dimension::KShift => {
            let k = spec.test_k.unwrap_or(base.k + 1);
            GeneratorConfig { k, ..base.clone() }.validate()?;
            test_recipe.orders = OrderSource::Random { axiom_set: base.axiom_set, k, l: base.l };
        }
        Dimension::LShift => {
            let l = spec.test_l.unwrap_or(base.l + 2);
            GeneratorConfig { l, ..base.clone() }.validate()?;
            test_recipe.orders = OrderSource::Random { axiom_set: base.axiom_set, k: base.k, l };
        }
    }

    let test = test_set(&test_recipe, theorem_seed(base.seed, TEST_STREAM), spec.test_size)?;
    let test_keys = test.iter().map(Theorem::canonical_key).collect();
    let train = TrainStream {
        recipe: train_recipe,
        seed: theorem_seed(base.seed, TRAIN_STREAM),
        next: 0,
        test_keys,
        max_retries: base.max_retries,
    };
    Ok(Split { spec: spec.clone(), test, train, train_orders, test_orders, train_combinations, test_combinations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::AxiomSet;

    fn keys(ts: &[Theorem]) -> HashSet<String> {
        ts.iter().map(Theorem::canonical_key).collect()
    }

    #[test]
    fn parses_dimension_names() {
        for d in Dimension::ALL {
            assert_eq!(d.name().parse::<Dimension>().unwrap(), d);
        }
        assert_eq!("K_SHIFT".parse::<Dimension>().unwrap(), Dimension::KShift);
        assert!("width".parse::<Dimension>().is_err());
    }

    #[test]
    fn iid_split_has_no_collisions() {
        let base = GeneratorConfig::new(AxiomSet::OrderedField, 2, 3).with_seed(1);
        let mut split = generate_split(&SplitSpec::new(Dimension::Iid).with_test_size(40), &base).unwrap();
        assert_eq!(split.test.len(), 40);
        assert_eq!(keys(&split.test).len(), 40);
        let train = split.train.next_batch(80, Exec::Sequential).unwrap();
        assert!(keys(&train).is_disjoint(&keys(&split.test)));
    }

    #[test]
    fn orders_split_keeps_pools_apart() {
        let base = GeneratorConfig::new(AxiomSet::OrderedField, 3, 5).with_seed(2);
        let spec = SplitSpec { n_orders: 30, n_test_orders: 20, ..SplitSpec::new(Dimension::Orders).with_test_size(20) };
        let mut split = generate_split(&spec, &base).unwrap();
        assert_eq!(split.train_orders.len(), 30);
        for o in &split.test_orders {
            assert!(!split.train_orders.contains(o));
        }
        for t in &split.test {
            assert!(split.test_orders.contains(&t.meta.axiom_order));
        }
        for t in split.train.next_batch(20, Exec::Sequential).unwrap() {
            assert!(split.train_orders.contains(&t.meta.axiom_order));
        }
    }

    #[test]
    fn shift_splits_change_the_test_parameters() {
        let base = GeneratorConfig::new(AxiomSet::Field, 2, 3).with_seed(3);
        let split = generate_split(&SplitSpec::new(Dimension::KShift).with_test_size(10), &base).unwrap();
        assert!(split.test.iter().all(|t| t.meta.k == 3 && t.meta.l == 3));
        let split = generate_split(&SplitSpec::new(Dimension::LShift).with_test_size(10), &base).unwrap();
        assert!(split.test.iter().all(|t| t.meta.k == 2 && t.meta.l == 5));
        let bad = SplitSpec { test_k: Some(4), ..SplitSpec::new(Dimension::KShift) };
        assert!(generate_split(&bad, &base).is_err());
    }
}
