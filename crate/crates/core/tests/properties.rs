use int_core::axioms::AxiomSet;
use int_core::env::{encode_seq, observe};
use int_core::expr::{parse_entity, parse_statement, Entity, Rel, Statement};
use int_core::generator::{generate_one, GeneratorConfig};
use int_core::kernel::{init_state, verify};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Entity> {
    prop_oneof![
        prop::sample::select(vec!['a', 'b', 'c', 'd', 'e']).prop_map(Entity::var),
        Just(Entity::zero()),
        Just(Entity::one()),
    ]
}

fn entity() -> impl Strategy<Value = Entity> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Entity::add(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Entity::mul(l, r)),
            inner.clone().prop_map(Entity::neg),
            inner.clone().prop_map(Entity::inv),
            inner.prop_map(Entity::sqr),
        ]
    })
}

fn statement() -> impl Strategy<Value = Statement> {
    (prop::sample::select(vec![Rel::Eq, Rel::Geq, Rel::Leq]), entity(), entity())
        .prop_map(|(rel, l, r)| Statement::new(rel, l, r))
}

proptest! {
    #[test]
    fn entity_text_round_trips(e in entity()) {
        let text = e.to_string();
        prop_assert_eq!(parse_entity(&text).unwrap(), e);
    }

    #[test]
    fn statement_text_round_trips(s in statement()) {
        let text = s.to_string();
        let back = parse_statement(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(back, s);
    }

    #[test]
    fn degree_counts_operators(e in entity()) {
        let ops = e.to_string().chars().filter(|c| matches!(c, '+' | '*' | '^')).count()
            + e.to_string().matches("(-").count()
            + e.to_string().matches("(1/").count();
        prop_assert_eq!(e.degree(), ops);
    }

    #[test]
    fn observation_mentions_the_goal(s in statement()) {
        let state = init_state(&int_core::kernel::Theorem::new(s.clone(), vec![]));
        let obs = observe(&state);
        prop_assert!(encode_seq(&state).starts_with(&s.to_string()));
        prop_assert_eq!(obs.seq, encode_seq(&state));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generation_is_deterministic_and_valid(seed in any::<u64>(), index in 0u64..1000, k in 2usize..4, extra in 0usize..3) {
        let cfg = GeneratorConfig::new(AxiomSet::OrderedField, k, k + extra).with_seed(seed);
        let a = generate_one(&cfg, index).unwrap();
        let b = generate_one(&cfg, index).unwrap();
        prop_assert_eq!(&a, &b);
        let proof = a.proof.clone().unwrap();
        prop_assert_eq!(proof.len(), k + extra);
        prop_assert!(verify(&a, &proof));
    }
}
