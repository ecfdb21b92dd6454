//! Structural properties of scenarios, strategies and the locality test.

mod support;

use belldist_core::scenario::{
    enumerate_strategies, is_local, is_nonsignaling, make_pr_box, mix_with_uniform,
    validate_behavior, Scenario,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{oracle_is_local, random_local_chsh, random_ns_chsh};

proptest! {
    #[test]
    fn flat_index_is_a_bijection(
        inputs in proptest::collection::vec(1usize..4, 1..4),
        outputs_seed in proptest::collection::vec(1usize..4, 1..4),
    ) {
        let parties = inputs.len().min(outputs_seed.len());
        let inputs = inputs[..parties].to_vec();
        let outputs = outputs_seed[..parties].to_vec();
        let s = Scenario::new(inputs, outputs).unwrap();
        prop_assume!(s.dimension() <= 10_000);
        for idx in 0..s.dimension() {
            let (x, a) = s.split_index(idx);
            prop_assert_eq!(s.flat_index(&x, &a).unwrap(), idx);
        }
    }

    #[test]
    fn mixing_preserves_validity_and_ns(v in 0.0f64..=1.0) {
        let q = mix_with_uniform(&make_pr_box(), v).unwrap();
        prop_assert!(validate_behavior(&q).valid);
        prop_assert!(is_nonsignaling(&q, 1e-12));
    }
}

#[test]
fn strategy_columns_are_local_and_nonsignaling() {
    for scen in [
        Scenario::chsh(),
        Scenario::new(vec![2, 3], vec![3, 2]).unwrap(),
        Scenario::symmetric(3, 2, 2).unwrap(),
    ] {
        let a = enumerate_strategies(&scen).unwrap();
        for col in 0..a.columns() {
            let b = a.column_behavior(col);
            assert!(is_nonsignaling(&b, 0.0), "column {col}");
            let r = is_local(&b, &a).unwrap();
            assert!(r.local, "column {col}");
            let weights = r.weights.unwrap();
            let rebuilt = a.mix(&weights).unwrap();
            for (x, y) in rebuilt.iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn locality_test_agrees_with_reference_on_random_points() {
    let scen = Scenario::chsh();
    let a = enumerate_strategies(&scen).unwrap();
    let vertices = support::chsh_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut locals = 0;
    let mut nonlocals = 0;
    for trial in 0..100 {
        // Alternate clearly local points and general NS points.
        let q = if trial % 2 == 0 {
            random_local_chsh(&mut rng, &vertices)
        } else {
            random_ns_chsh(&mut rng, &vertices)
        };
        let mine = is_local(&q, &a).unwrap().local;
        let reference = oracle_is_local(&q, &a);
        assert_eq!(mine, reference, "trial {trial}");
        if mine {
            locals += 1;
        } else {
            nonlocals += 1;
        }
    }
    assert!(locals >= 40, "sampler drifted: {locals} local");
    assert!(nonlocals >= 20, "sampler drifted: {nonlocals} non-local");
}

#[test]
fn pr_box_is_not_local_but_tsirelson_mixture_is_closer() {
    let scen = Scenario::chsh();
    let a = enumerate_strategies(&scen).unwrap();
    assert!(!is_local(&make_pr_box(), &a).unwrap().local);
    // The Tsirelson-value mixture still lies outside the local polytope.
    let t = mix_with_uniform(&make_pr_box(), core::f64::consts::FRAC_1_SQRT_2).unwrap();
    assert!(!is_local(&t, &a).unwrap().local);
    // A heavily noisy mixture is local.
    let noisy = mix_with_uniform(&make_pr_box(), 0.4).unwrap();
    assert!(is_local(&noisy, &a).unwrap().local);
}
