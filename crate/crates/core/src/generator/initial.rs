//! Initial conditions `X=X` with `X` of an exact degree over the variables.

use rand::Rng;

use crate::expr::{Entity, Statement, DEFAULT_ALPHABET};

const UNARY: u128 = 3;
const BINARY: u128 = 2;

/// Number of entities of exactly `degree` operators whose leaves are
/// alphabet variables, or `None` if it does not fit in a `u128`.
pub fn count_entities(degree: usize) -> Option<u128> {
    counts(degree).map(|t| t[degree])
}

fn counts(degree: usize) -> Option<Vec<u128>> {
    let mut t: Vec<u128> = Vec::with_capacity(degree + 1);
    t.push(DEFAULT_ALPHABET.len() as u128);
    for d in 1..=degree {
        let mut total = UNARY.checked_mul(t[d - 1])?;
        for i in 0..d {
            let pair = t[i].checked_mul(t[d - 1 - i])?.checked_mul(BINARY)?;
            total = total.checked_add(pair)?;
        }
        t.push(total);
    }
    Some(t)
}

fn leaf<R: Rng + ?Sized>(rng: &mut R) -> Entity {
    Entity::var(DEFAULT_ALPHABET[rng.gen_range(0..DEFAULT_ALPHABET.len())])
}

fn unary(op: u128, child: Entity) -> Entity {
    match op {
        0 => Entity::neg(child),
        1 => Entity::inv(child),
        _ => Entity::sqr(child),
    }
}

fn binary(op: u128, l: Entity, r: Entity) -> Entity {
    if op == 0 {
        Entity::add(l, r)
    } else {
        Entity::mul(l, r)
    }
}

fn sample_exact<R: Rng + ?Sized>(t: &[u128], degree: usize, rng: &mut R) -> Entity {
    if degree == 0 {
        return leaf(rng);
    }
    let mut ticket = rng.gen_range(0..t[degree]);
    let unary_total = UNARY * t[degree - 1];
    if ticket < unary_total {
        let op = ticket / t[degree - 1];
        return unary(op, sample_exact(t, degree - 1, rng));
    }
    ticket -= unary_total;
    for i in 0..degree {
        let block = BINARY * t[i] * t[degree - 1 - i];
        if ticket < block {
            let op = ticket / (t[i] * t[degree - 1 - i]);
            let l = sample_exact(t, i, rng);
            let r = sample_exact(t, degree - 1 - i, rng);
            return binary(op, l, r);
        }
        ticket -= block;
    }
    unreachable!("ticket below the total count")
}

fn sample_top_down<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Entity {
    if degree == 0 {
        return leaf(rng);
    }
    let op = rng.gen_range(0..5u128);
    if op < UNARY {
        unary(op, sample_top_down(degree - 1, rng))
    } else {
        let left = rng.gen_range(0..degree);
        binary(op - UNARY, sample_top_down(left, rng), sample_top_down(degree - 1 - left, rng))
    }
}

/// An entity of exactly `degree` operators: uniform over all such entities
/// while they can be counted, top-down random construction beyond that.
pub fn sample_entity<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Entity {
    match counts(degree) {
        Some(t) => sample_exact(&t, degree, rng),
        None => sample_top_down(degree, rng),
    }
}

pub fn sample_initial_condition<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Statement {
    let x = sample_entity(degree, rng);
    Statement::eq(x.clone(), x)
}

/// The set the generator draws its first core statement from: every
/// `v=v` at degree 0, one sampled condition otherwise.
pub fn initial_conditions<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Vec<Statement> {
    if degree == 0 {
        DEFAULT_ALPHABET.iter().map(|&v| Statement::eq(Entity::var(v), Entity::var(v))).collect()
    } else {
        vec![sample_initial_condition(degree, rng)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    /// Brute-force enumeration, independent of the counting recurrence.
    fn enumerate(degree: usize) -> Vec<Entity> {
        if degree == 0 {
            return DEFAULT_ALPHABET.iter().map(|&v| Entity::var(v)).collect();
        }
        let mut out = Vec::new();
        for c in enumerate(degree - 1) {
            out.push(Entity::neg(c.clone()));
            out.push(Entity::inv(c.clone()));
            out.push(Entity::sqr(c));
        }
        for i in 0..degree {
            for l in enumerate(i) {
                for r in enumerate(degree - 1 - i) {
                    out.push(Entity::add(l.clone(), r.clone()));
                    out.push(Entity::mul(l.clone(), r));
                }
            }
        }
        out
    }

    #[test]
    fn counts_match_enumeration() {
        for d in 0..=3 {
            assert_eq!(count_entities(d).unwrap(), enumerate(d).len() as u128);
        }
        assert_eq!(count_entities(1), Some(65));
    }

    #[test]
    fn degree_zero_is_a_variable() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let s = sample_initial_condition(0, &mut rng);
            assert!(s.is_reflexive());
            assert!(matches!(s.lhs, Entity::Var(v) if DEFAULT_ALPHABET.contains(&v)));
        }
    }

    #[test]
    fn sampled_entities_have_exact_degree_and_cover_degree_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let all: HashSet<Entity> = enumerate(1).into_iter().collect();
        let mut seen = HashSet::new();
        for _ in 0..5000 {
            let e = sample_entity(1, &mut rng);
            assert!(all.contains(&e));
            seen.insert(e);
        }
        assert_eq!(seen.len(), all.len());
        for d in [2, 5, 40, 120] {
            assert_eq!(sample_entity(d, &mut rng).degree(), d);
        }
        assert!(count_entities(120).is_none());
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let a = sample_initial_condition(2, &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_initial_condition(2, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }
}
