//! Born-rule behaviors from pure states and projective measurements.
//!
//! The dense complex layer is deliberately small: state dimensions in this
//! crate never exceed a few hundred amplitudes, and every measurement is a
//! family of orthogonal projectors summing to the identity. The quantum
//! behavior `p(a⃗|x⃗) = ⟨ψ| ⊗_k M^{x_k}_{a_k} |ψ⟩` is evaluated by applying
//! each party's projector on its own tensor axis.

mod complex;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use complex::C64;

use crate::inequalities;
use crate::math;
use crate::scenario::{Behavior, Scenario};
use crate::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;

/// Dense square complex matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat {
            dim,
            data: vec![C64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::ONE);
        }
        m
    }

    /// Rank-one projector `v v†` onto a (normalized) vector.
    pub fn projector(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = CMat::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, v[r] * v[c].conj());
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn add_assign(&mut self, other: &CMat) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b;
        }
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let v = self.get(r, k);
                if v == C64::ZERO {
                    continue;
                }
                for c in 0..n {
                    let cur = out.get(r, c);
                    out.set(r, c, cur + v * other.get(k, c));
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        let worst = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm_sqr())
            .fold(0.0f64, f64::max);
        math::sqrt(worst)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        for r in 0..self.dim {
            for c in 0..self.dim {
                let d = self.get(r, c) - self.get(c, r).conj();
                if d.norm_sqr() > tol * tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_idempotent(&self, tol: f64) -> bool {
        self.matmul(self).max_abs_diff(self) <= tol
    }
}

/// A normalized pure state on a tensor product of local spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != amps.len() || dims.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: amps.len(),
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("state norm² is {norm}, expected 1")));
        }
        Ok(StateVector { dims, amps })
    }

    /// `(|0…0⟩ + |1…1⟩)/√2` on `parties` qubits.
    pub fn ghz(parties: usize) -> Result<Self> {
        if parties == 0 || parties > 20 {
            return Err(Error::Domain("GHZ needs 1 <= parties <= 20".into()));
        }
        let dim = 1usize << parties;
        let mut amps = vec![C64::ZERO; dim];
        let w = C64::real(1.0 / math::sqrt(2.0));
        amps[0] = w;
        amps[dim - 1] = w;
        StateVector::new(vec![2; parties], amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }
}

/// Per-party, per-input lists of orthogonal projectors summing to identity.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementFamily {
    parties: Vec<PartyMeasurements>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartyMeasurements {
    pub dim: usize,
    /// `per_input[x][a]` is the projector of outcome `a` at input `x`.
    pub per_input: Vec<Vec<CMat>>,
}

impl MeasurementFamily {
    pub fn new(parties: Vec<PartyMeasurements>) -> Result<Self> {
        for p in &parties {
            if p.per_input.is_empty() {
                return Err(Error::DegenerateScenario);
            }
            let outcomes = p.per_input[0].len();
            for input in &p.per_input {
                if input.len() != outcomes || outcomes == 0 {
                    return Err(Error::DegenerateScenario);
                }
                let mut sum = CMat::zeros(p.dim);
                for proj in input {
                    if proj.dim() != p.dim {
                        return Err(Error::DimensionMismatch {
                            expected: p.dim,
                            got: proj.dim(),
                        });
                    }
                    if !proj.is_hermitian(HERMITIAN_TOL) {
                        return Err(Error::Domain("projector is not Hermitian".into()));
                    }
                    if !proj.is_idempotent(HERMITIAN_TOL) {
                        return Err(Error::Domain("projector is not idempotent".into()));
                    }
                    sum.add_assign(proj);
                }
                if sum.max_abs_diff(&CMat::identity(p.dim)) > HERMITIAN_TOL {
                    return Err(Error::Domain(
                        "projectors of one input do not sum to identity".into(),
                    ));
                }
            }
        }
        Ok(MeasurementFamily { parties })
    }

    pub fn parties(&self) -> &[PartyMeasurements] {
        &self.parties
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let inputs = self.parties.iter().map(|p| p.per_input.len()).collect();
        let outputs = self.parties.iter().map(|p| p.per_input[0].len()).collect();
        Scenario::new(inputs, outputs)
    }
}

/// Apply a matrix on one tensor axis of an amplitude vector.
fn apply_on_axis(amps: &mut [C64], dims: &[usize], axis: usize, m: &CMat) {
    let d = dims[axis];
    let stride: usize = dims[axis + 1..].iter().product();
    let block = d * stride;
    let mut scratch = vec![C64::ZERO; d];
    let mut base = 0;
    while base < amps.len() {
        for inner in 0..stride {
            for a in 0..d {
                scratch[a] = amps[base + a * stride + inner];
            }
            for a in 0..d {
                let mut acc = C64::ZERO;
                for b in 0..d {
                    acc = acc + m.get(a, b) * scratch[b];
                }
                amps[base + a * stride + inner] = acc;
            }
        }
        base += block;
    }
}

/// The Born-rule behavior `p(a⃗|x⃗) = ⟨ψ| ⊗_k M^{x_k}_{a_k} |ψ⟩`.
pub fn born_behavior(state: &StateVector, meas: &MeasurementFamily) -> Result<Behavior> {
    let scenario = meas.scenario()?;
    if state.dims.len() != meas.parties.len()
        || state
            .dims
            .iter()
            .zip(&meas.parties)
            .any(|(&d, p)| d != p.dim)
    {
        return Err(Error::DimensionMismatch {
            expected: state.dims.len(),
            got: meas.parties.len(),
        });
    }
    let parties = scenario.parties();
    let mut values = Vec::with_capacity(scenario.dimension());
    let mut work: Vec<C64> = Vec::with_capacity(state.amps.len());
    for x in scenario.input_tuples_iter() {
        for a in scenario.output_tuples_iter() {
            work.clear();
            work.extend_from_slice(&state.amps);
            for k in 0..parties {
                apply_on_axis(
                    &mut work,
                    &state.dims,
                    k,
                    &meas.parties[k].per_input[x[k]][a[k]],
                );
            }
            let mut p = 0.0;
            for (w, psi) in work.iter().zip(&state.amps) {
                // ⟨ψ|Πψ⟩ is real for a Hermitian product of projectors.
                p += psi.conj().re * w.re - psi.conj().im * w.im;
            }
            values.push(p);
        }
    }
    Behavior::from_values(scenario, values)
}

/// Two qubits in the maximally entangled state with the measurement angles
/// that maximize the CHSH functional: the behavior at the quantum boundary.
pub fn chsh_tsirelson_setup() -> (StateVector, MeasurementFamily) {
    let amps = vec![
        C64::real(1.0 / math::sqrt(2.0)),
        C64::ZERO,
        C64::ZERO,
        C64::real(1.0 / math::sqrt(2.0)),
    ];
    let state = StateVector::new(vec![2, 2], amps).expect("normalized");
    // Observables cos(α)Z + sin(α)X; eigenvectors (cos α/2, sin α/2) and
    // (−sin α/2, cos α/2). Alice uses Z and X, Bob the diagonal pair.
    let angles_a = [0.0, core::f64::consts::FRAC_PI_2];
    let angles_b = [core::f64::consts::FRAC_PI_4, -core::f64::consts::FRAC_PI_4];
    let party = |angles: &[f64]| PartyMeasurements {
        dim: 2,
        per_input: angles
            .iter()
            .map(|&alpha| {
                let c = math::cos(alpha / 2.0);
                let s = math::sin(alpha / 2.0);
                vec![
                    CMat::projector(&[C64::real(c), C64::real(s)]),
                    CMat::projector(&[C64::real(-s), C64::real(c)]),
                ]
            })
            .collect(),
    };
    let meas = MeasurementFamily::new(vec![party(&angles_a), party(&angles_b)])
        .expect("projective by construction");
    (state, meas)
}

/// The two-qutrit family `|φ⟩ = γ|00⟩ + √(1−2γ²)|11⟩ + γ|22⟩` with the
/// standard CGLMP measurement bases: Fourier bases with phase offsets
/// `α = (0, 1/2)` for one party and `β = (1/4, −1/4)` for the other.
pub fn cglmp_setup(gamma: f64) -> Result<(StateVector, MeasurementFamily)> {
    let limit = 1.0 / math::sqrt(2.0);
    if !(0.0..=limit + 1e-15).contains(&gamma) {
        return Err(Error::Domain(format!(
            "gamma must lie in [0, 1/sqrt(2)], got {gamma}"
        )));
    }
    let d = 3usize;
    let mid = math::sqrt((1.0 - 2.0 * gamma * gamma).max(0.0));
    let mut amps = vec![C64::ZERO; d * d];
    amps[0] = C64::real(gamma);
    amps[4] = C64::real(mid);
    amps[8] = C64::real(gamma);
    let state = StateVector::new(vec![d, d], amps)?;

    let tau = 2.0 * core::f64::consts::PI / d as f64;
    let norm = 1.0 / math::sqrt(d as f64);
    // Party basis vectors: v_out(j) ∝ exp(i·τ·j·(sign·out + offset)).
    let party = |offsets: &[f64], sign: f64| PartyMeasurements {
        dim: d,
        per_input: offsets
            .iter()
            .map(|&off| {
                (0..d)
                    .map(|out| {
                        let v: Vec<C64> = (0..d)
                            .map(|j| {
                                C64::cis(tau * j as f64 * (sign * out as f64 + off)).scale(norm)
                            })
                            .collect();
                        CMat::projector(&v)
                    })
                    .collect()
            })
            .collect(),
    };
    let alice = party(&[0.0, 0.5], 1.0);
    let bob = party(&[0.25, -0.25], -1.0);
    let meas = MeasurementFamily::new(vec![alice, bob])?;
    Ok((state, meas))
}

/// GHZ state and XY-plane observables for the Mermin functional. Every
/// party uses the angle pair `(θ₀, θ₀ + π/2)`; the common offset `θ₀` is
/// chosen in closed form to maximize the correlator combination, reaching
/// `⟨M_N⟩ = 2^{(N−1)/2}`.
pub fn ghz_mermin_setup(parties: usize) -> Result<(StateVector, MeasurementFamily)> {
    let (table, _) = inequalities::make_mermin(parties)?;
    // With all parties at angles θ_x = θ₀ + x·π/2 the GHZ correlator at
    // setting tuple x⃗ is cos(N·θ₀ + |x⃗|·π/2), so the functional equals
    // Re[e^{i N θ₀} Σ_x c_x i^{|x|}]; the best θ₀ aligns the phase.
    let mut s = C64::ZERO;
    for (xi, &c) in table.coefficients().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let rot = match xi.count_ones() % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        s = s + rot.scale(c);
    }
    let theta0 = -math::atan2(s.im, s.re) / parties as f64;

    let state = StateVector::ghz(parties)?;
    let half = 1.0 / math::sqrt(2.0);
    let meas = MeasurementFamily::new(
        (0..parties)
            .map(|_| PartyMeasurements {
                dim: 2,
                per_input: (0..2)
                    .map(|x| {
                        let theta = theta0 + x as f64 * core::f64::consts::FRAC_PI_2;
                        let phase = C64::cis(theta).scale(half);
                        vec![
                            CMat::projector(&[C64::real(half), phase]),
                            CMat::projector(&[C64::real(half), -phase]),
                        ]
                    })
                    .collect(),
            })
            .collect(),
    )?;
    Ok((state, meas))
}
