//! Shared helpers for the integration suites: an independent reference LP
//! solver and seeded random generators.
//!
//! The reference solver is intentionally primitive: a single-phase big-M
//! tableau with Bland's rule and no refinement. It shares no code with the
//! production solver and exists to cross-check statuses and optimal values
//! on small instances.

#![allow(dead_code)]

use belldist_core::freeops::{InputChannel, LocalChannel, OutputMap, Relabeling};
use belldist_core::scenario::{pr_box_variant, Behavior, Scenario, StrategyMatrix};
use rand::RngExt;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleOutcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// Solve `min c·x` s.t. `A_eq x = b_eq`, `A_le x ≤ b_le`, `x ≥ 0` with a
/// big-M tableau and Bland pivoting.
pub fn oracle_solve(
    c: &[f64],
    a_eq: &[Vec<f64>],
    b_eq: &[f64],
    a_le: &[Vec<f64>],
    b_le: &[f64],
) -> OracleOutcome {
    let nv = c.len();
    let m = a_eq.len() + a_le.len();
    let scale = c.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let big_m = 1e7 * scale;

    // Column layout: structural, slacks (one per <= row), artificials.
    let n_slack = a_le.len();
    // Count artificials: every eq row, plus every flipped <= row.
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new(); // (coeffs, rhs, is_eq)
    for (r, b) in a_eq.iter().zip(b_eq) {
        rows.push((r.clone(), *b, true));
    }
    for (r, b) in a_le.iter().zip(b_le) {
        rows.push((r.clone(), *b, false));
    }
    let mut n_art = 0;
    for (_, b, is_eq) in &rows {
        if *is_eq || *b < 0.0 {
            n_art += 1;
        }
    }
    let ncols = nv + n_slack + n_art;

    let mut tab = vec![vec![0.0f64; ncols + 1]; m];
    let mut cost = vec![0.0f64; ncols];
    cost[..nv].copy_from_slice(c);
    let mut basis = vec![0usize; m];
    let mut slack_idx = 0;
    let mut art_idx = 0;
    for (i, (coeffs, b, is_eq)) in rows.iter().enumerate() {
        let flip = *b < 0.0;
        let sgn = if flip { -1.0 } else { 1.0 };
        for (j, &v) in coeffs.iter().enumerate() {
            tab[i][j] = sgn * v;
        }
        tab[i][ncols] = sgn * b;
        if !*is_eq {
            tab[i][nv + slack_idx] = sgn;
            slack_idx += 1;
        }
        if *is_eq || flip {
            let col = nv + n_slack + art_idx;
            tab[i][col] = 1.0;
            cost[col] = big_m;
            basis[i] = col;
            art_idx += 1;
        } else {
            basis[i] = nv + slack_idx - 1;
        }
    }

    // Reduced costs: z_j = cost_j − Σ cost[basis] tab[.][j].
    let reduced = |tab: &Vec<Vec<f64>>, basis: &Vec<usize>, j: usize| -> f64 {
        let mut acc = cost[j];
        for (i, row) in tab.iter().enumerate() {
            acc -= cost[basis[i]] * row[j];
        }
        acc
    };

    for _ in 0..200_000 {
        // Bland: first column with negative reduced cost.
        let mut enter = usize::MAX;
        for j in 0..ncols {
            if basis.contains(&j) {
                continue;
            }
            if reduced(&tab, &basis, j) < -1e-7 {
                enter = j;
                break;
            }
        }
        if enter == usize::MAX {
            // Optimal; decide feasibility by artificial mass.
            let mut art_mass = 0.0;
            for (i, &b) in basis.iter().enumerate() {
                if b >= nv + n_slack {
                    art_mass += tab[i][ncols];
                }
            }
            if art_mass > 1e-6 {
                return OracleOutcome::Infeasible;
            }
            let mut value = 0.0;
            for (i, &b) in basis.iter().enumerate() {
                if b < nv {
                    value += c[b] * tab[i][ncols];
                }
            }
            return OracleOutcome::Optimal(value);
        }
        // Ratio test, Bland tie-break on the basis variable.
        let mut leave = usize::MAX;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if tab[i][enter] > 1e-9 {
                let ratio = tab[i][ncols] / tab[i][enter];
                if ratio < best - 1e-12
                    || (ratio < best + 1e-12 && leave != usize::MAX && basis[i] < basis[leave])
                {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if leave == usize::MAX {
            // An unbounded ray of the penalized program only certifies
            // unboundedness when the program is actually feasible.
            if c.iter().all(|&v| v == 0.0) {
                return OracleOutcome::Unbounded;
            }
            return match oracle_solve(&vec![0.0; nv], a_eq, b_eq, a_le, b_le) {
                OracleOutcome::Infeasible => OracleOutcome::Infeasible,
                _ => OracleOutcome::Unbounded,
            };
        }
        // Pivot.
        let piv = tab[leave][enter];
        for v in tab[leave].iter_mut() {
            *v /= piv;
        }
        for i in 0..m {
            if i == leave {
                continue;
            }
            let f = tab[i][enter];
            if f != 0.0 {
                for j in 0..=ncols {
                    let upd = tab[leave][j];
                    tab[i][j] -= f * upd;
                }
            }
        }
        basis[leave] = enter;
    }
    panic!("reference solver did not terminate");
}

/// Reference membership test: is `q` a convex mixture of the columns?
pub fn oracle_is_local(q: &Behavior, a: &StrategyMatrix) -> bool {
    let n = a.rows();
    let m = a.columns();
    let mut a_eq: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut b_eq = Vec::with_capacity(n + 1);
    for j in 0..n {
        a_eq.push(a.row(j).to_vec());
        b_eq.push(q.values()[j]);
    }
    a_eq.push(vec![1.0; m]);
    b_eq.push(1.0);
    matches!(
        oracle_solve(&vec![0.0; m], &a_eq, &b_eq, &[], &[]),
        OracleOutcome::Optimal(_)
    )
}

/// The 24 vertices of the CHSH non-signaling polytope.
pub fn chsh_vertices() -> Vec<Behavior> {
    let a = belldist_core::scenario::enumerate_strategies(&Scenario::chsh()).unwrap();
    let mut v: Vec<Behavior> = (0..16).map(|i| a.column_behavior(i)).collect();
    for alpha in 0..2 {
        for beta in 0..2 {
            for gamma in 0..2 {
                v.push(pr_box_variant(alpha, beta, gamma));
            }
        }
    }
    v
}

/// Dirichlet(1) weights.
pub fn dirichlet(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k)
        .map(|_| -f64::ln(1.0 - rng.random::<f64>()))
        .collect();
    let total: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= total;
    }
    w
}

/// Random point of the CHSH non-signaling polytope, drawn from three
/// families so that both sides of the local boundary are well covered:
/// Dirichlet mixtures of all 24 vertices, a PR vertex mixed against a
/// random local point, and a PR vertex mixed with white noise.
pub fn random_ns_chsh(rng: &mut ChaCha8Rng, vertices: &[Behavior]) -> Behavior {
    let n = vertices[0].scenario().dimension();
    let mut values = vec![0.0; n];
    match rng.random_range(0..3) {
        0 => {
            let w = dirichlet(rng, vertices.len());
            for (wi, vert) in w.iter().zip(vertices) {
                for (acc, x) in values.iter_mut().zip(vert.values()) {
                    *acc += wi * x;
                }
            }
        }
        1 => {
            let pr = &vertices[16 + rng.random_range(0..8)];
            let t: f64 = 0.3 + 0.7 * rng.random::<f64>();
            let w = dirichlet(rng, 16);
            for (wi, vert) in w.iter().zip(&vertices[..16]) {
                for (acc, x) in values.iter_mut().zip(vert.values()) {
                    *acc += (1.0 - t) * wi * x;
                }
            }
            for (acc, x) in values.iter_mut().zip(pr.values()) {
                *acc += t * x;
            }
        }
        _ => {
            let pr = &vertices[16 + rng.random_range(0..8)];
            let v: f64 = 0.4 + 0.6 * rng.random::<f64>();
            let mixed = 1.0 / 4.0;
            for (acc, x) in values.iter_mut().zip(pr.values()) {
                *acc = v * x + (1.0 - v) * mixed;
            }
        }
    }
    Behavior::from_values(Scenario::chsh(), values).unwrap()
}

/// Random local behavior of the CHSH scenario.
pub fn random_local_chsh(rng: &mut ChaCha8Rng, vertices: &[Behavior]) -> Behavior {
    let n = vertices[0].scenario().dimension();
    let w = dirichlet(rng, 16);
    let mut values = vec![0.0; n];
    for (wi, vert) in w.iter().zip(&vertices[..16]) {
        for (acc, x) in values.iter_mut().zip(vert.values()) {
            *acc += wi * x;
        }
    }
    Behavior::from_values(Scenario::chsh(), values).unwrap()
}

pub fn random_permutation(rng: &mut ChaCha8Rng, k: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// Random relabeling of a symmetric scenario.
pub fn random_relabeling(rng: &mut ChaCha8Rng, scenario: &Scenario) -> Relabeling {
    let parties = scenario.parties();
    Relabeling {
        party: random_permutation(rng, parties),
        inputs: (0..parties)
            .map(|k| random_permutation(rng, scenario.inputs()[k]))
            .collect(),
        outputs: (0..parties)
            .map(|k| {
                (0..scenario.inputs()[k])
                    .map(|_| random_permutation(rng, scenario.outputs()[k]))
                    .collect()
            })
            .collect(),
    }
}

/// Random local output channel: Dirichlet weights over five tuples of
/// per-party deterministic output maps (outcome count preserved).
pub fn random_local_channel(rng: &mut ChaCha8Rng, scenario: &Scenario) -> LocalChannel {
    let weights = dirichlet(rng, 5);
    let components = weights
        .into_iter()
        .map(|w| {
            let maps = (0..scenario.parties())
                .map(|k| {
                    let m = scenario.inputs()[k];
                    let d = scenario.outputs()[k];
                    OutputMap {
                        new_outputs: d,
                        map: (0..m)
                            .map(|_| (0..d).map(|_| rng.random_range(0..d)).collect())
                            .collect(),
                    }
                })
                .collect();
            (w, maps)
        })
        .collect();
    LocalChannel { components }
}

/// Random restricted input channel: Dirichlet mixture of five tuples of
/// per-party input permutations, which always satisfy the column-sum
/// restriction.
pub fn random_input_channel(rng: &mut ChaCha8Rng, scenario: &Scenario) -> InputChannel {
    let weights = dirichlet(rng, 5);
    let components = weights
        .into_iter()
        .map(|w| {
            let maps = (0..scenario.parties())
                .map(|k| random_permutation(rng, scenario.inputs()[k]))
                .collect();
            (w, maps)
        })
        .collect();
    InputChannel { components }
}
