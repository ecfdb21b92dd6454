//! Seeded random behaviors and free operations for reproducible checks.
//!
//! Everything here is deterministic for a fixed seed (ChaCha8 keyed by the
//! `--seed` flag), so reported monotonicity sweeps can be replayed.

use belldist_core::freeops::{InputChannel, LocalChannel, OutputMap, Relabeling};
use belldist_core::scenario::{enumerate_strategies, pr_box_variant, Behavior, Scenario};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The 24 vertices of the CHSH-scenario non-signaling polytope: the 16
/// deterministic points followed by the 8 PR-box variants.
pub fn chsh_ns_vertices() -> Vec<Behavior> {
    let a = enumerate_strategies(&Scenario::chsh()).expect("tiny scenario");
    let mut v: Vec<Behavior> = (0..a.columns()).map(|i| a.column_behavior(i)).collect();
    for alpha in 0..2u8 {
        for beta in 0..2u8 {
            for gamma in 0..2u8 {
                v.push(pr_box_variant(alpha, beta, gamma));
            }
        }
    }
    v
}

/// Dirichlet(1, …, 1) weights.
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
/// families: Dirichlet mixtures of all vertices, a PR vertex against a
/// random local point, and a PR vertex against white noise. Both sides of
/// the local boundary are well represented.
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
            for (acc, x) in values.iter_mut().zip(pr.values()) {
                *acc = v * x + (1.0 - v) * 0.25;
            }
        }
    }
    Behavior::from_values(Scenario::chsh(), values).expect("vertex mixture")
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
    Behavior::from_values(Scenario::chsh(), values).expect("vertex mixture")
}

pub fn random_permutation(rng: &mut ChaCha8Rng, k: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

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

/// Dirichlet mixture of five tuples of per-party deterministic output maps
/// (outcome counts preserved).
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

/// Dirichlet mixture of five tuples of per-party input permutations; the
/// column-sum restriction holds automatically.
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
