//! Published bound values of the inequality families, checked through the
//! LP at moderate sizes. The acceptance suite repeats these at the largest
//! in-scope sizes.

use belldist_core::inequalities::{
    evaluate, local_bound, make_cglmp, make_inn22, make_mermin, mermin_max_ns_behavior,
    mermin_ns_maximum, ns_bound, ns_bound_with_behavior,
};
use belldist_core::measures::{nl, nl_given_value, ConstrainedNl};
use belldist_core::scenario::{enumerate_strategies, InputDistribution};

fn approx(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b}");
}

#[test]
fn recomputed_local_bounds_match_stored_values() {
    let mut functionals = vec![belldist_core::inequalities::make_chsh()];
    for d in 2..=4 {
        functionals.push(make_cglmp(d).unwrap());
    }
    for n in 2..=4 {
        functionals.push(make_inn22(n).unwrap());
    }
    for p in 2..=4 {
        functionals.push(make_mermin(p).unwrap().1);
    }
    for f in &functionals {
        let a = enumerate_strategies(f.scenario()).unwrap();
        let recomputed = local_bound(f, &a).unwrap();
        assert_eq!(recomputed, f.local_bound(), "{}", f.label());
    }
}

#[test]
fn evaluation_is_linear() {
    let f = make_cglmp(3).unwrap();
    let (v, q1) = ns_bound_with_behavior(&f).unwrap();
    assert!(v > 0.49);
    let q2 = belldist_core::scenario::Behavior::uniform(f.scenario().clone());
    for &t in &[0.0, 0.3, 0.7, 1.0] {
        let mix = belldist_core::freeops::convex_mix(&[(t, &q1), (1.0 - t, &q2)]).unwrap();
        let lhs = evaluate(&f, &mix).unwrap();
        let rhs = t * evaluate(&f, &q1).unwrap() + (1.0 - t) * evaluate(&f, &q2).unwrap();
        approx(lhs, rhs, 1e-12);
    }
}

#[test]
fn inn22_nl_at_maximum_decreases_with_settings() {
    let mut previous = f64::INFINITY;
    for n in 2..=4usize {
        let f = make_inn22(n).unwrap();
        approx(ns_bound(&f).unwrap(), (n as f64 - 1.0) / 2.0, 1e-7);
        let scen = f.scenario().clone();
        let a = enumerate_strategies(&scen).unwrap();
        let pi = InputDistribution::uniform(scen);
        let c = (n as f64 - 1.0) / 2.0;
        let value = match nl_given_value(&f, c, &pi, &a).unwrap() {
            ConstrainedNl::Optimal { value, .. } => value,
            ConstrainedNl::Infeasible => panic!("n={n}: NS maximum must be feasible"),
        };
        assert!(value < previous - 1e-6, "n={n}: {value} !< {previous}");
        previous = value;
    }
    // The observed sequence follows (n−1)/n².
    approx(previous, 3.0 / 16.0, 1e-7);
}

#[test]
fn mermin_bounds_small_sizes() {
    for n in 2..=4usize {
        let (_, f) = make_mermin(n).unwrap();
        approx(f.local_bound(), 1.0, 0.0);
        approx(ns_bound(&f).unwrap(), mermin_ns_maximum(n), 1e-7);
    }
}

#[test]
fn mermin_three_nl_under_both_input_distributions() {
    let (table, f) = make_mermin(3).unwrap();
    let scen = f.scenario().clone();
    let a = enumerate_strategies(&scen).unwrap();
    let q = mermin_max_ns_behavior(3).unwrap();
    approx(evaluate(&f, &q).unwrap(), 2.0, 1e-12);

    let uniform = InputDistribution::uniform(scen.clone());
    approx(nl(&q, &uniform, &a).unwrap().value, 0.125, 1e-6);

    let tuples: Vec<Vec<usize>> = (0..8usize)
        .filter(|&xi| table.coefficients()[xi] != 0.0)
        .map(|xi| vec![(xi >> 2) & 1, (xi >> 1) & 1, xi & 1])
        .collect();
    let weighted = InputDistribution::supported_on(scen, &tuples).unwrap();
    approx(nl(&q, &weighted, &a).unwrap().value, 0.25, 1e-6);
}

#[test]
fn cglmp_constrained_line_for_middle_sizes() {
    for d in [3usize, 4] {
        let f = make_cglmp(d).unwrap();
        let scen = f.scenario().clone();
        let a = enumerate_strategies(&scen).unwrap();
        let pi = InputDistribution::uniform(scen);
        for &c in &[0.0, 0.125, 0.3, 0.5] {
            match nl_given_value(&f, c, &pi, &a).unwrap() {
                ConstrainedNl::Optimal { value, .. } => approx(value, c / 2.0, 1e-6),
                ConstrainedNl::Infeasible => panic!("d={d} c={c} must be feasible"),
            }
        }
    }
}

#[test]
fn i3322_noise_mixture_moves_linearly() {
    // Mixing the maximizer with white noise sweeps the functional along
    // 2v − 1.
    let f = make_inn22(3).unwrap();
    let (bound, q_max) = ns_bound_with_behavior(&f).unwrap();
    approx(bound, 1.0, 1e-8);
    for &v in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        let q = belldist_core::scenario::mix_with_uniform(&q_max, v).unwrap();
        approx(evaluate(&f, &q).unwrap(), 2.0 * v - 1.0, 1e-7);
    }
}

#[test]
fn constrained_curve_is_convex_in_the_value() {
    // Second differences of c ↦ nl_given_value(I3322, c) stay non-negative.
    let f = make_inn22(3).unwrap();
    let scen = f.scenario().clone();
    let a = enumerate_strategies(&scen).unwrap();
    let pi = InputDistribution::uniform(scen);
    let mut curve = Vec::new();
    for k in 0..=20 {
        let c = -0.5 + 1.5 * k as f64 / 20.0;
        match nl_given_value(&f, c, &pi, &a).unwrap() {
            ConstrainedNl::Optimal { value, .. } => curve.push(value),
            ConstrainedNl::Infeasible => panic!("c={c} inside the NS range"),
        }
    }
    for w in curve.windows(3) {
        assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-8, "{w:?}");
    }
}

#[test]
fn cglmp_paper_point_on_fig_three() {
    // The d=3 quantum maximum: least NL at the observed functional value.
    let f = make_cglmp(3).unwrap();
    let scen = f.scenario().clone();
    let a = enumerate_strategies(&scen).unwrap();
    let pi = InputDistribution::uniform(scen);
    match nl_given_value(&f, 0.2287, &pi, &a).unwrap() {
        ConstrainedNl::Optimal { value, .. } => approx(value, 0.1143, 1e-3),
        ConstrainedNl::Infeasible => panic!("0.2287 is attainable"),
    }
}
