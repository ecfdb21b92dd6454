//! Monotonicity of the trace-distance measure under the free operations,
//! checked through the LP on randomized instances. The acceptance suite
//! runs the full-size version; these runs keep the core crate's own tests
//! fast while covering every operation class.

mod support;

use belldist_core::freeops::{convex_mix, input_enlarge, post_process, pre_process, relabel};
use belldist_core::measures::nl;
use belldist_core::scenario::{
    enumerate_strategies, is_nonsignaling, validate_behavior, InputDistribution, Scenario,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{
    chsh_vertices, dirichlet, random_input_channel, random_local_channel, random_local_chsh,
    random_ns_chsh, random_relabeling,
};

const TOL: f64 = 1e-9;

#[test]
fn relabeling_leaves_nl_invariant() {
    let scen = Scenario::chsh();
    let a = enumerate_strategies(&scen).unwrap();
    let pi = InputDistribution::uniform(scen.clone());
    let vertices = chsh_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..60 {
        let q = random_ns_chsh(&mut rng, &vertices);
        let r = random_relabeling(&mut rng, &scen);
        let image = relabel(&q, &r).unwrap();
        let before = nl(&q, &pi, &a).unwrap().value;
        let after = nl(&image, &pi, &a).unwrap().value;
        assert!(
            (before - after).abs() <= TOL,
            "trial {trial}: {before} vs {after}"
        );
    }
}

#[test]
fn convexity_bound_holds() {
    let scen = Scenario::chsh();
    let a = enumerate_strategies(&scen).unwrap();
    let pi = InputDistribution::uniform(scen);
    let vertices = chsh_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for trial in 0..40 {
        let parts: Vec<_> = (0..3)
            .map(|_| random_ns_chsh(&mut rng, &vertices))
            .collect();
        let w = dirichlet(&mut rng, 3);
        let mixture =
            convex_mix(&[(w[0], &parts[0]), (w[1], &parts[1]), (w[2], &parts[2])]).unwrap();
        let lhs = nl(&mixture, &pi, &a).unwrap().value;
        let rhs: f64 = parts
            .iter()
            .zip(&w)
            .map(|(q, wi)| wi * nl(q, &pi, &a).unwrap().value)
            .sum();
        assert!(lhs <= rhs + TOL, "trial {trial}: {lhs} vs {rhs}");
    }
}

#[test]
fn mixing_with_local_points_contracts() {
    let scen = Scenario::chsh();
    let a = enumerate_strategies(&scen).unwrap();
    let pi = InputDistribution::uniform(scen);
    let vertices = chsh_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for trial in 0..40 {
        let q = random_ns_chsh(&mut rng, &vertices);
        let p = random_local_chsh(&mut rng, &vertices);
        let t: f64 = rng.random();
        let mixture = convex_mix(&[(t, &q), (1.0 - t, &p)]).unwrap();
        let lhs = nl(&mixture, &pi, &a).unwrap().value;
        let bound = t * nl(&q, &pi, &a).unwrap().value;
        assert!(lhs <= bound + TOL, "trial {trial}: {lhs} vs {bound}");
    }
}

#[test]
fn post_processing_never_increases_nl() {
    let scen = Scenario::chsh();
    let a = enumerate_strategies(&scen).unwrap();
    let pi = InputDistribution::uniform(scen.clone());
    let vertices = chsh_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for trial in 0..40 {
        let q = random_ns_chsh(&mut rng, &vertices);
        let ch = random_local_channel(&mut rng, &scen);
        let image = post_process(&q, &ch).unwrap();
        assert!(validate_behavior(&image).valid);
        assert!(is_nonsignaling(&image, 1e-9));
        let before = nl(&q, &pi, &a).unwrap().value;
        // Binary outcomes are preserved by the generator, so the image
        // lives on the same scenario.
        let after = nl(&image, &pi, &a).unwrap().value;
        assert!(after <= before + TOL, "trial {trial}: {after} vs {before}");
    }
}

#[test]
fn pre_processing_never_increases_nl() {
    let scen = Scenario::chsh();
    let a = enumerate_strategies(&scen).unwrap();
    let pi = InputDistribution::uniform(scen.clone());
    let vertices = chsh_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for trial in 0..40 {
        let q = random_ns_chsh(&mut rng, &vertices);
        let ch = random_input_channel(&mut rng, &scen);
        let image = pre_process(&q, &ch).unwrap();
        assert!(validate_behavior(&image).valid);
        assert!(is_nonsignaling(&image, 1e-9));
        let before = nl(&q, &pi, &a).unwrap().value;
        let after = nl(&image, &pi, &a).unwrap().value;
        assert!(after <= before + TOL, "trial {trial}: {after} vs {before}");
    }
}

#[test]
fn input_enlarging_never_increases_nl() {
    let scen = Scenario::chsh();
    let a = enumerate_strategies(&scen).unwrap();
    let pi = InputDistribution::uniform(scen.clone());
    let vertices = chsh_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for trial in 0..25 {
        let q = random_ns_chsh(&mut rng, &vertices);
        let party = rng.random_range(0..2);
        let fixed = rng.random_range(0..2);
        let image = input_enlarge(&q, party, fixed).unwrap();
        assert!(validate_behavior(&image).valid);
        assert!(is_nonsignaling(&image, 1e-9));
        let big_scen = image.scenario().clone();
        let big_a = enumerate_strategies(&big_scen).unwrap();
        let big_pi = InputDistribution::uniform(big_scen);
        let before = nl(&q, &pi, &a).unwrap().value;
        let after = nl(&image, &big_pi, &big_a).unwrap().value;
        assert!(after <= before + TOL, "trial {trial}: {after} vs {before}");
    }
}

#[test]
fn enlarging_a_local_behavior_stays_local() {
    let vertices = chsh_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..10 {
        let q = random_local_chsh(&mut rng, &vertices);
        let image = input_enlarge(&q, 1, 0).unwrap();
        let big_a = enumerate_strategies(image.scenario()).unwrap();
        assert!(
            belldist_core::scenario::is_local(&image, &big_a)
                .unwrap()
                .local
        );
    }
}
