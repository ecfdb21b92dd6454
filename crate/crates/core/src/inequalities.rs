//! Bell functionals: evaluation, exact local bounds, LP non-signaling
//! bounds, and constructors for the CHSH, CGLMP(d), Inn22(n) and Mermin
//! families.
//!
//! All functionals are purely linear in the behavior. Constant offsets
//! (such as the `−1/2` of the CGLMP expression) are folded into the
//! coefficients by distributing them uniformly over the per-input
//! normalization `Σ_a⃗ q(a⃗|x⃗) = 1`. Marginal terms in Collins-Gisin
//! shorthand are expanded at reference input 0 of the other parties; for
//! non-signaling behaviors the reference choice is immaterial.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::freeops::Relabeling;
use crate::matrix::dot;
use crate::scenario::{enumerate_strategies, Behavior, Scenario, StrategyMatrix};
use crate::{lp, Error, Result};

/// A linear functional over behavior entries with its exact local bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BellFunctional {
    scenario: Scenario,
    coefficients: Vec<f64>,
    local_bound: f64,
    label: String,
}

impl BellFunctional {
    /// Wrap raw coefficients. When `local_bound` is `None` it is computed
    /// exactly by enumerating all deterministic strategies.
    pub fn from_parts(
        scenario: Scenario,
        coefficients: Vec<f64>,
        local_bound: Option<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if coefficients.len() != scenario.dimension() {
            return Err(Error::DimensionMismatch {
                expected: scenario.dimension(),
                got: coefficients.len(),
            });
        }
        let local_bound = match local_bound {
            Some(b) => b,
            None => {
                let a = enumerate_strategies(&scenario)?;
                max_over_columns(&coefficients, &a)?
            }
        };
        Ok(BellFunctional {
            scenario,
            coefficients,
            local_bound,
            label: label.into(),
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn local_bound(&self) -> f64 {
        self.local_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

fn max_over_columns(coeffs: &[f64], a: &StrategyMatrix) -> Result<f64> {
    let values = a.functional_on_columns(coeffs)?;
    values
        .into_iter()
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        })
        .ok_or(Error::DegenerateScenario)
}

/// Inner product of the functional with a behavior.
pub fn evaluate(f: &BellFunctional, q: &Behavior) -> Result<f64> {
    if q.scenario() != &f.scenario {
        return Err(Error::ScenarioMismatch);
    }
    Ok(dot(&f.coefficients, q.values()))
}

/// Exact maximum of the functional over the strategy columns.
pub fn local_bound(f: &BellFunctional, a: &StrategyMatrix) -> Result<f64> {
    if a.scenario() != &f.scenario {
        return Err(Error::ScenarioMismatch);
    }
    max_over_columns(&f.coefficients, a)
}

/// LP maximum of the functional over valid non-signaling behaviors.
pub fn ns_bound(f: &BellFunctional) -> Result<f64> {
    Ok(ns_bound_with_behavior(f)?.0)
}

/// Non-signaling maximum together with a maximizing behavior.
pub fn ns_bound_with_behavior(f: &BellFunctional) -> Result<(f64, Behavior)> {
    let lp_prog = lp::ns_maximum_program(&f.scenario, &f.coefficients)?;
    let sol = lp::solve(&lp_prog)?;
    match sol.status {
        lp::LpStatus::Optimal => Ok((
            -sol.objective,
            Behavior::from_values(f.scenario.clone(), sol.primal)?,
        )),
        _ => Err(Error::Solver(lp::SolverError::Numerical {
            detail: "non-signaling maximization was not optimal",
        })),
    }
}

/// The CHSH functional in Collins-Gisin form,
/// `p(00|00) + p(00|01) + p(00|10) − p(00|11) − p_A(0|0) − p_B(0|0) ≤ 0`,
/// with the marginals expanded at the other party's input 0.
pub fn make_chsh() -> BellFunctional {
    let scenario = Scenario::chsh();
    let mut coeffs = vec![0.0; scenario.dimension()];
    let mut add = |x: &[usize], a: &[usize], v: f64| {
        coeffs[scenario.flat_index(x, a).unwrap()] += v;
    };
    add(&[0, 0], &[0, 0], 1.0);
    add(&[0, 1], &[0, 0], 1.0);
    add(&[1, 0], &[0, 0], 1.0);
    add(&[1, 1], &[0, 0], -1.0);
    // p_A(0|0) at Bob's reference input y = 0.
    add(&[0, 0], &[0, 0], -1.0);
    add(&[0, 0], &[0, 1], -1.0);
    // p_B(0|0) at Alice's reference input x = 0.
    add(&[0, 0], &[0, 0], -1.0);
    add(&[0, 0], &[1, 0], -1.0);
    BellFunctional::from_parts(scenario, coeffs, None, "CHSH").expect("CHSH is well-formed")
}

/// The 24 vertices of the CHSH-scenario non-signaling polytope: 16 local
/// deterministic points and the 8 PR-box variants.
pub fn chsh_ns_vertices() -> Vec<Behavior> {
    let a = enumerate_strategies(&Scenario::chsh()).expect("tiny scenario");
    let mut vertices: Vec<Behavior> = (0..a.columns()).map(|i| a.column_behavior(i)).collect();
    for alpha in 0..2u8 {
        for beta in 0..2u8 {
            for gamma in 0..2u8 {
                vertices.push(crate::scenario::pr_box_variant(alpha, beta, gamma));
            }
        }
    }
    vertices
}

/// Canonical fingerprint of a functional on the non-signaling subspace:
/// its values on the 24 polytope vertices, quantized. Functionals that
/// agree on every non-signaling behavior share a fingerprint.
fn chsh_ns_fingerprint(coeffs: &[f64], vertices: &[Behavior]) -> Vec<i64> {
    vertices
        .iter()
        .map(|v| {
            let val = dot(coeffs, v.values());
            libround(val * 1e9)
        })
        .collect()
}

fn libround(x: f64) -> i64 {
    if x >= 0.0 {
        (x + 0.5) as i64
    } else {
        (x - 0.5) as i64
    }
}

/// Orbit of the CHSH functional under all relabelings of parties, inputs
/// and outputs, deduplicated on the non-signaling subspace. Has exactly
/// eight members.
pub fn chsh_symmetry_orbit(f: &BellFunctional) -> Result<Vec<BellFunctional>> {
    if f.scenario != Scenario::chsh() {
        return Err(Error::ScenarioMismatch);
    }
    let scenario = f.scenario.clone();
    let vertices = chsh_ns_vertices();
    let mut classes: BTreeMap<Vec<i64>, Vec<f64>> = BTreeMap::new();
    let swaps = [[0usize, 1usize], [1, 0]];
    for party_swap in 0..2 {
        for in_a in 0..2 {
            for in_b in 0..2 {
                for out_mask in 0..16u8 {
                    let r = Relabeling {
                        party: swaps[party_swap].to_vec(),
                        inputs: vec![swaps[in_a].to_vec(), swaps[in_b].to_vec()],
                        outputs: vec![
                            vec![
                                swaps[(out_mask & 1) as usize].to_vec(),
                                swaps[((out_mask >> 1) & 1) as usize].to_vec(),
                            ],
                            vec![
                                swaps[((out_mask >> 2) & 1) as usize].to_vec(),
                                swaps[((out_mask >> 3) & 1) as usize].to_vec(),
                            ],
                        ],
                    };
                    let image = r.apply_to_entries(&scenario, &f.coefficients)?;
                    let key = chsh_ns_fingerprint(&image, &vertices);
                    classes.entry(key).or_insert(image);
                }
            }
        }
    }
    let mut orbit = Vec::with_capacity(classes.len());
    for (i, (_, coeffs)) in classes.into_iter().enumerate() {
        orbit.push(BellFunctional::from_parts(
            scenario.clone(),
            coeffs,
            None,
            format!("{}#{}", f.label, i),
        )?);
    }
    Ok(orbit)
}

/// The CGLMP functional for two parties, two inputs and `d` outcomes,
/// normalized so that the local bound is 0 and the non-signaling maximum
/// is 1/2.
pub fn make_cglmp(d: usize) -> Result<BellFunctional> {
    if d < 2 {
        return Err(Error::Domain(format!("CGLMP needs d >= 2, got {d}")));
    }
    let scenario = Scenario::new(vec![2, 2], vec![d, d])?;
    let n = scenario.dimension();
    let mut coeffs = vec![0.0; n];

    // Joint terms: for each weight (1 − 2k/(d−1))/4 add the eight
    // probability classes p(a = b ± shift | xy).
    for k in 0..d / 2 {
        let omega = if d == 2 {
            0.25
        } else {
            (1.0 - 2.0 * k as f64 / (d as f64 - 1.0)) / 4.0
        };
        // (x, y, residue of a−b mod d, sign)
        let terms: [(usize, usize, i64, f64); 8] = [
            (0, 0, k as i64, 1.0),
            (0, 0, -(k as i64) - 1, -1.0),
            (0, 1, -(k as i64), 1.0),
            (0, 1, k as i64 + 1, -1.0),
            (1, 0, -(k as i64) - 1, 1.0),
            (1, 0, k as i64, -1.0),
            (1, 1, k as i64, 1.0),
            (1, 1, -(k as i64) - 1, -1.0),
        ];
        for &(x, y, residue, sign) in &terms {
            let res = residue.rem_euclid(d as i64) as usize;
            for b in 0..d {
                let a = (b + res) % d;
                let idx = scenario.flat_index(&[x, y], &[a, b])?;
                coeffs[idx] += sign * omega;
            }
        }
    }

    // Fold the constant −1/2 uniformly over the four normalization sums.
    let fold = -0.5 / scenario.input_tuples() as f64;
    for c in coeffs.iter_mut() {
        *c += fold;
    }

    BellFunctional::from_parts(scenario, coeffs, None, format!("CGLMP-{d}"))
}

/// The Inn22 functional for `n` settings per party and binary outcomes, in
/// the triangular Collins-Gisin pattern; `n = 2` reproduces CHSH and
/// `n = 3` the I3322 inequality. Local bound 0.
pub fn make_inn22(n: usize) -> Result<BellFunctional> {
    if !(2..=7).contains(&n) {
        return Err(Error::Domain(format!(
            "Inn22 supports 2 <= n <= 7, got {n}"
        )));
    }
    let scenario = Scenario::new(vec![n, n], vec![2, 2])?;
    let mut coeffs = vec![0.0; scenario.dimension()];
    {
        let mut add = |x: &[usize], a: &[usize], v: f64| {
            coeffs[scenario.flat_index(x, a).unwrap()] += v;
        };
        for x in 0..n {
            for y in 0..n {
                if x + y < n {
                    add(&[x, y], &[0, 0], 1.0);
                } else if x + y == n {
                    add(&[x, y], &[0, 0], -1.0);
                }
            }
        }
        // Alice marginals −(n−1−x)·p_A(0|x), expanded at y = 0.
        for x in 0..n {
            let w = -((n - 1 - x) as f64);
            if w != 0.0 {
                for b in 0..2 {
                    add(&[x, 0], &[0, b], w);
                }
            }
        }
        // Bob marginal −p_B(0|0), expanded at x = 0.
        for a in 0..2 {
            add(&[0, 0], &[a, 0], -1.0);
        }
    }
    BellFunctional::from_parts(scenario, coeffs, None, format!("I{n}{n}22"))
}

/// Full-correlator coefficient table of a Mermin functional: `coeffs[x]`
/// multiplies `⟨A₁^{x₁} ⋯ A_N^{x_N}⟩`, with setting tuples encoded party 1
/// most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct MerminCorrelators {
    parties: usize,
    coeffs: Vec<f64>,
}

impl MerminCorrelators {
    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn nonzero_settings(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0.0).count()
    }

    pub fn negative_settings(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c < 0.0).count()
    }

    /// Exact LHV maximum: best per-party deterministic sign assignments.
    pub fn classical_maximum(&self) -> f64 {
        let n = self.parties;
        let mut best = f64::NEG_INFINITY;
        // Each party picks signs for (A, Ā): 4 options encoded in 2 bits.
        let strategies = 1usize << (2 * n);
        for s in 0..strategies {
            let mut value = 0.0;
            for (x, &c) in self.coeffs.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let mut sign = 1.0;
                for k in 0..n {
                    // Party k reads setting bit (party 1 most significant).
                    let xk = (x >> (n - 1 - k)) & 1;
                    let bits = (s >> (2 * k)) & 3;
                    if (bits >> xk) & 1 == 1 {
                        sign = -sign;
                    }
                }
                value += c * sign;
            }
            if value > best {
                best = value;
            }
        }
        best
    }
}

/// The non-signaling maximum `2^{⌈(N−1)/2⌉}` of `M_N`.
pub fn mermin_ns_maximum(parties: usize) -> f64 {
    crate::math::pow2((parties / 2) as u32)
}

/// Build the Mermin functional `M_N` from the recursion
/// `M_i = (M_{i−1}/2)(A_i + Ā_i) + (M̄_{i−1}/2)(A_i − Ā_i)` with
/// `M₁ = A₁`. Returns the correlator table and the probability-space
/// functional obtained by expanding each correlator over outcome parities.
pub fn make_mermin(parties: usize) -> Result<(MerminCorrelators, BellFunctional)> {
    if !(2..=8).contains(&parties) {
        return Err(Error::Domain(format!(
            "Mermin supports 2 <= N <= 8, got {parties}"
        )));
    }
    let mut coeffs = vec![1.0, 0.0];
    for i in 2..=parties {
        let prev = coeffs;
        let size = 1usize << (i - 1);
        let mask = size - 1;
        let mut next = vec![0.0; 2 * size];
        for x in 0..size {
            let bar = prev[x ^ mask];
            next[2 * x] = (prev[x] + bar) / 2.0;
            next[2 * x + 1] = (prev[x] - bar) / 2.0;
        }
        coeffs = next;
    }
    let table = MerminCorrelators { parties, coeffs };

    let scenario = Scenario::symmetric(parties, 2, 2)?;
    let ot = scenario.output_tuples();
    let mut f_coeffs = vec![0.0; scenario.dimension()];
    for (xi, &c) in table.coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for ai in 0..ot {
            let parity = (ai.count_ones() & 1) as i32;
            f_coeffs[xi * ot + ai] = if parity == 0 { c } else { -c };
        }
    }
    let bound = table.classical_maximum();
    let f =
        BellFunctional::from_parts(scenario, f_coeffs, Some(bound), format!("Mermin-{parties}"))?;
    Ok((table, f))
}

/// The non-signaling behavior maximizing `M_N`: on every setting with a
/// nonzero correlator coefficient, uniform weight `1/2^{N−1}` on outcome
/// strings whose parity matches the coefficient sign; on absent settings
/// the maximally mixed conditional.
pub fn mermin_max_ns_behavior(parties: usize) -> Result<Behavior> {
    let (table, f) = make_mermin(parties)?;
    let scenario = f.scenario().clone();
    let ot = scenario.output_tuples();
    let peak = 1.0 / (ot as f64 / 2.0);
    let mixed = 1.0 / ot as f64;
    let mut values = vec![0.0; scenario.dimension()];
    for (xi, &c) in table.coefficients().iter().enumerate() {
        for ai in 0..ot {
            let parity = ai.count_ones() & 1;
            values[xi * ot + ai] = if c == 0.0 {
                mixed
            } else if (c > 0.0) == (parity == 0) {
                peak
            } else {
                0.0
            };
        }
    }
    Behavior::from_values(scenario, values)
}

/// Number of settings with a negative coefficient in the `M_N` correlator
/// table, counted directly from the recursion.
pub fn count_negative_settings(parties: usize) -> Result<usize> {
    if parties % 2 != 0 {
        return Err(Error::Domain(format!(
            "negative-setting count is defined for even N, got {parties}"
        )));
    }
    let (table, _) = make_mermin(parties)?;
    Ok(table.negative_settings())
}
