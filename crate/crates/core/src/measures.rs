//! Non-locality quantifiers.
//!
//! * [`nl`]: the trace-distance measure, solved exactly as a linear
//!   program; returns the closest local behavior.
//! * [`nl_given_value`]: the least `NL` compatible with a pinned Bell
//!   functional value, minimized over all valid non-signaling behaviors.
//! * [`chsh_closed_form`]: `NL = ½·max(0, Π(CHSH))` over the eight CHSH
//!   symmetries, valid for non-signaling behaviors of the CHSH scenario.
//! * [`dual_certificate`]: an LP dual vector `v` with `‖v‖_∞ ≤ 1` whose
//!   affine form certifies `NL` from below for any behavior.
//! * [`nonlocal_content`]: the EPR-2 weight, `1` minus the largest local
//!   mass fitting under the behavior.
//! * [`nl_kl`]: the relative-entropy measure, minimized over the local
//!   polytope by conditional-gradient descent with exact line search.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::inequalities::{self, BellFunctional};
use crate::lp::{self, LpStatus};
use crate::matrix::{dot, Mat};
use crate::scenario::{Behavior, InputDistribution, Scenario, StrategyMatrix};
use crate::{math, Error, Result, FEAS_TOL};

/// Half the ℓ1 distance between two equally long joint distributions
/// `p(a⃗, x⃗) = π(x⃗)·p(a⃗|x⃗)`.
pub fn trace_distance(q: &[f64], p: &[f64]) -> Result<f64> {
    if q.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            got: p.len(),
        });
    }
    Ok(0.5 * q.iter().zip(p).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Result of the free non-locality program.
#[derive(Debug, Clone)]
pub struct NlResult {
    pub value: f64,
    /// The closest local behavior `p* = A·λ*`.
    pub closest_local: Behavior,
    /// Its convex decomposition over strategy columns.
    pub weights: Vec<f64>,
}

/// Minimum input-weighted trace distance from `q` to the local polytope.
pub fn nl(q: &Behavior, pi: &InputDistribution, a: &StrategyMatrix) -> Result<NlResult> {
    let prog = lp::assemble_nl_program(q, a, pi)?;
    let sol = lp::solve(&prog.lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(lp::SolverError::Numerical {
            detail: "the free non-locality program must be feasible and bounded",
        }));
    }
    let lambda = sol.primal[prog.n..prog.n + prog.m].to_vec();
    let closest = a.mix(&lambda)?;
    Ok(NlResult {
        value: sol.objective.max(0.0),
        closest_local: Behavior::from_values(q.scenario().clone(), closest)?,
        weights: lambda,
    })
}

/// Outcome of the constrained program: infeasibility is data (scans sweep
/// functional values up to and including the polytope boundary).
#[derive(Debug, Clone)]
pub enum ConstrainedNl {
    Optimal {
        value: f64,
        /// A non-signaling behavior attaining the minimum.
        attaining: Behavior,
        /// Its closest local behavior.
        closest_local: Behavior,
    },
    Infeasible,
}

/// Least `NL` over valid non-signaling behaviors with `f·q = c`.
pub fn nl_given_value(
    f: &BellFunctional,
    c: f64,
    pi: &InputDistribution,
    a: &StrategyMatrix,
) -> Result<ConstrainedNl> {
    let prog = lp::assemble_constrained_nl_program(f, c, a, pi)?;
    let sol = lp::solve(&prog.lp)?;
    match sol.status {
        LpStatus::Optimal => {
            let lambda = &sol.primal[prog.n..prog.n + prog.m];
            let closest = a.mix(lambda)?;
            let attaining = sol.primal[prog.n + prog.m..].to_vec();
            Ok(ConstrainedNl::Optimal {
                value: sol.objective.max(0.0),
                attaining: Behavior::from_values(f.scenario().clone(), attaining)?,
                closest_local: Behavior::from_values(f.scenario().clone(), closest)?,
            })
        }
        LpStatus::Infeasible => Ok(ConstrainedNl::Infeasible),
        LpStatus::Unbounded => Err(Error::Solver(lp::SolverError::Numerical {
            detail: "the constrained program cannot be unbounded",
        })),
    }
}

/// `NL` of a non-signaling CHSH-scenario behavior in closed form:
/// `½·max(0, max over the eight CHSH symmetries)`.
pub fn chsh_closed_form(q: &Behavior) -> Result<f64> {
    if *q.scenario() != Scenario::chsh() {
        return Err(Error::ScenarioMismatch);
    }
    let violation = q.ns_violation();
    if violation > FEAS_TOL {
        return Err(Error::NotNonsignaling { violation });
    }
    let orbit = inequalities::chsh_symmetry_orbit(&inequalities::make_chsh())?;
    let mut best = f64::NEG_INFINITY;
    for f in &orbit {
        best = best.max(inequalities::evaluate(f, q)?);
    }
    Ok(0.5 * best.max(0.0))
}

/// A dual optimum of the free program: a vector `v` with `‖v‖_∞ ≤ 1`
/// witnessing `NL(q) = Σ_j w_j v_j q_j − max_i Σ_j w_j v_j A_{j,i}`.
///
/// By weak duality the same affine form evaluated on any other behavior
/// lower-bounds its `NL`, and it is non-positive on every local behavior.
#[derive(Debug, Clone)]
pub struct Certificate {
    /// Dual vector, sup-norm at most 1.
    pub v: Vec<f64>,
    /// Objective weights `w_j = π(x⃗(j))/2` the certificate was built for.
    pub weights: Vec<f64>,
    /// Certified value at the probed behavior.
    pub value: f64,
    /// `max_i Σ_j w_j v_j A_{j,i}` over the strategy columns.
    pub strategy_max: f64,
}

impl Certificate {
    /// The certified lower bound `Σ_j w_j v_j q'_j − strategy_max` at any
    /// behavior of the same scenario.
    pub fn lower_bound_at(&self, q: &Behavior) -> Result<f64> {
        if q.values().len() != self.v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.v.len(),
                got: q.values().len(),
            });
        }
        let mut acc = 0.0;
        for ((w, v), x) in self.weights.iter().zip(&self.v).zip(q.values()) {
            acc += w * v * x;
        }
        Ok(acc - self.strategy_max)
    }
}

/// Extract the dual certificate of the free program at `q`.
pub fn dual_certificate(
    q: &Behavior,
    pi: &InputDistribution,
    a: &StrategyMatrix,
) -> Result<Certificate> {
    let prog = lp::assemble_nl_program(q, a, pi)?;
    let sol = lp::solve(&prog.lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(lp::SolverError::Numerical {
            detail: "dual extraction needs an optimal solve",
        }));
    }
    let n = prog.n;
    // Multipliers of the two absolute-value blocks: rows 0..n carry
    // A·λ − t ≤ q (α), rows n..2n carry −A·λ − t ≤ −q (β); v = (β − α)/w.
    let mut v = vec![0.0; n];
    for j in 0..n {
        let w = prog.weights[j];
        if w > 0.0 {
            let alpha = sol.dual_ineq[j].max(0.0);
            let beta = sol.dual_ineq[n + j].max(0.0);
            let mut vj = (beta - alpha) / w;
            if vj.abs() > 1.0 {
                if vj.abs() > 1.0 + 1e-7 {
                    return Err(Error::Solver(lp::SolverError::Numerical {
                        detail: "certificate escaped the unit ball",
                    }));
                }
                vj = vj.signum();
            }
            v[j] = vj;
        }
    }
    let weighted: Vec<f64> = prog.weights.iter().zip(&v).map(|(w, v)| w * v).collect();
    let on_columns = a.functional_on_columns(&weighted)?;
    let strategy_max = on_columns.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let value = dot(&weighted, q.values()) - strategy_max;
    if (value - sol.objective).abs() > 1e-6 {
        return Err(Error::Solver(lp::SolverError::Numerical {
            detail: "certificate value drifted from the primal optimum",
        }));
    }
    Ok(Certificate {
        v,
        weights: prog.weights,
        value,
        strategy_max,
    })
}

/// EPR-2 non-local content: `1 − max{Σλ : λ ≥ 0, A·λ ≤ q entrywise}`.
pub fn nonlocal_content(q: &Behavior, a: &StrategyMatrix) -> Result<f64> {
    if q.scenario() != a.scenario() {
        return Err(Error::ScenarioMismatch);
    }
    let n = a.rows();
    let m = a.columns();
    let mut ineq = Mat::zeros(n, m);
    for j in 0..n {
        ineq.row_mut(j).copy_from_slice(a.row(j));
    }
    let lp_prog = lp::LinearProgram::nonnegative(
        vec![-1.0; m],
        Mat::zeros(0, m),
        Vec::new(),
        ineq,
        q.values().to_vec(),
    )?;
    let sol = lp::solve(&lp_prog)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(lp::SolverError::Numerical {
            detail: "local-mass maximization must be feasible and bounded",
        }));
    }
    Ok((1.0 + sol.objective).clamp(0.0, 1.0))
}

/// Violation-based lower bound on the non-local content:
/// `(f·q − I_L)/(I_NS − I_L)`, clamped below at zero.
pub fn bell_lower_bound_content(
    f: &BellFunctional,
    q: &Behavior,
    a: &StrategyMatrix,
) -> Result<f64> {
    let value = inequalities::evaluate(f, q)?;
    let local = inequalities::local_bound(f, a)?;
    let ns = inequalities::ns_bound(f)?;
    if ns - local <= 1e-12 {
        return Err(Error::Domain(format!(
            "degenerate bound gap: ns {ns}, local {local}"
        )));
    }
    Ok(((value - local) / (ns - local)).max(0.0))
}

/// Kullback-Leibler divergence in bits between equally long distributions,
/// with `0·log(0/·) = 0` and `+∞` whenever `q_j > 0` meets `p_j = 0`.
pub fn kl_divergence(q: &[f64], p: &[f64]) -> Result<f64> {
    if q.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            got: p.len(),
        });
    }
    let mut acc = 0.0;
    for (&qj, &pj) in q.iter().zip(p) {
        if qj <= 0.0 {
            continue;
        }
        if pj <= 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += qj * math::log2(qj / pj);
    }
    Ok(acc)
}

/// Options for the conditional-gradient minimization of [`nl_kl`].
#[derive(Debug, Clone, Copy)]
pub struct NlKlOptions {
    /// Stop when the Frank-Wolfe duality gap falls below this value (bits).
    pub gap_tol: f64,
    pub max_iterations: usize,
}

impl Default for NlKlOptions {
    fn default() -> Self {
        NlKlOptions {
            gap_tol: 1e-7,
            max_iterations: 100_000,
        }
    }
}

/// Result of the relative-entropy minimization.
#[derive(Debug, Clone)]
pub struct NlKl {
    /// `min_λ KL(π·q ‖ π·A·λ)` in bits (the input-weighted joint form).
    pub value: f64,
    pub minimizer: Behavior,
    pub weights: Vec<f64>,
    /// Final duality gap; an upper bound on the remaining suboptimality.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize the relative entropy from `q` to the local polytope by
/// conditional-gradient descent. The linear minimization oracle is an
/// argmin over strategy columns; iterates start from the barycenter, whose
/// mixture is strictly positive, and exact line search keeps the objective
/// finite throughout. Conditional-gradient steps alternate with monotone
/// multiplicative reweightings of the whole mixture, which remove the
/// slow zigzag near interior optima; the duality gap reported after every
/// gradient evaluation certifies the remaining suboptimality either way.
pub fn nl_kl(
    q: &Behavior,
    pi: &InputDistribution,
    a: &StrategyMatrix,
    opts: &NlKlOptions,
) -> Result<NlKl> {
    let scen = q.scenario();
    if a.scenario() != scen || pi.scenario() != scen {
        return Err(Error::ScenarioMismatch);
    }
    let n = scen.dimension();
    let m = a.columns();
    let ot = scen.output_tuples();
    let ln2_inv = core::f64::consts::LOG2_E;

    // Joint weights of the probed behavior.
    let mut joint = vec![0.0; n];
    for j in 0..n {
        joint[j] = pi.weight(j / ot) * q.values()[j];
    }

    let mut lambda = vec![1.0 / m as f64; m];
    let mut p = a.mix(&lambda)?;
    let objective = |p: &[f64]| -> f64 {
        let mut acc = 0.0;
        for j in 0..n {
            if joint[j] > 0.0 {
                acc += joint[j] * math::log2(q.values()[j] / p[j]);
            }
        }
        acc
    };

    let mut grad = vec![0.0; m];
    let mut direction = vec![0.0; n];
    let mut gap = f64::INFINITY;
    let mut iterations = 0usize;
    let mut converged = false;

    while iterations < opts.max_iterations {
        // ∇_i = −(1/ln2) Σ_j J_j A_{j,i} / p_j.
        for g in grad.iter_mut() {
            *g = 0.0;
        }
        for j in 0..n {
            if joint[j] == 0.0 {
                continue;
            }
            let w = -ln2_inv * joint[j] / p[j];
            for (g, aji) in grad.iter_mut().zip(a.row(j)) {
                *g += w * aji;
            }
        }
        let mut s = 0usize;
        for i in 1..m {
            if grad[i] < grad[s] {
                s = i;
            }
        }
        gap = dot(&grad, &lambda) - grad[s];
        if gap <= opts.gap_tol {
            converged = true;
            break;
        }

        if iterations % 2 == 1 {
            // Multiplicative reweighting: λ_i ← λ_i Σ_j J_j A_{j,i}/p_j,
            // which is λ_i·(−grad_i/log₂e). Never increases the objective
            // and stays on the simplex after renormalization.
            let mut total = 0.0;
            for (l, g) in lambda.iter_mut().zip(&grad) {
                *l *= -g / ln2_inv;
                total += *l;
            }
            if total > 0.0 {
                for l in lambda.iter_mut() {
                    *l /= total;
                }
            }
            p = a.mix(&lambda)?;
            iterations += 1;
            continue;
        }

        for j in 0..n {
            direction[j] = a.entry(j, s) - p[j];
        }
        // Exact line search on the convex 1-d slice via derivative
        // bisection; +∞ marks a step past the domain boundary.
        let slope = |t: f64| -> f64 {
            let mut acc = 0.0;
            for j in 0..n {
                if joint[j] == 0.0 {
                    continue;
                }
                let denom = p[j] + t * direction[j];
                if denom <= 0.0 {
                    return f64::INFINITY;
                }
                acc -= ln2_inv * joint[j] * direction[j] / denom;
            }
            acc
        };
        let t = if slope(1.0) <= 0.0 {
            1.0
        } else {
            let mut lo = 0.0f64;
            let mut hi = 1.0f64;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if slope(mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };

        for l in lambda.iter_mut() {
            *l *= 1.0 - t;
        }
        lambda[s] += t;
        for j in 0..n {
            p[j] += t * direction[j];
        }
        iterations += 1;
        if iterations % 1024 == 0 {
            // Shed accumulated drift.
            p = a.mix(&lambda)?;
        }
    }

    p = a.mix(&lambda)?;
    let value = objective(&p).max(0.0);
    Ok(NlKl {
        value,
        minimizer: Behavior::from_values(scen.clone(), p)?,
        weights: lambda,
        gap,
        iterations,
        converged,
    })
}

/// Pinsker lower bound on the relative-entropy measure:
/// `4·C·NL²` bits with `C = ½·log₂e`.
pub fn pinsker_bound(nl_value: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&nl_value) {
        return Err(Error::Domain(format!("NL value {nl_value} outside [0, 1]")));
    }
    Ok(2.0 * core::f64::consts::LOG2_E * nl_value * nl_value)
}

/// Closed-form `NL` of the noisy Mermin maximizer for even party counts:
/// `v·α_N/2^N` with `α_N` the directly counted negative settings.
pub fn mermin_nl_analytic(parties: usize, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("mixing weight {v} outside [0, 1]")));
    }
    let alpha = inequalities::count_negative_settings(parties)?;
    Ok(v * alpha as f64 / math::pow2(parties as u32))
}
