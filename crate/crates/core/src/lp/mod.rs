//! Dense linear programs: representation, a deterministic simplex solver,
//! and the assemblers for the non-locality programs.
//!
//! Two programs do most of the work in this crate. With `A` the matrix of
//! local deterministic strategies, `q` a behavior and `w_j = π(x⃗(j))/2`
//! the input weights:
//!
//! * the free program minimizes `Σ_j w_j t_j` subject to
//!   `−t ≤ q − A·λ ≤ t`, `λ ≥ 0`, `Σλ = 1`; its optimum is `NL(q)`;
//! * the constrained program additionally treats `q` as a variable and
//!   pins a Bell functional value `f·q = c` along with normalization,
//!   non-negativity and non-signaling of `q`; its optimum is the least
//!   `NL` compatible with the observed functional value.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::inequalities::BellFunctional;
use crate::matrix::{dot, Mat};
use crate::scenario::{Behavior, InputDistribution, LocalityResult, Scenario, StrategyMatrix};
use crate::{Error, Result, FEAS_TOL};

mod lu;
mod simplex;

/// Exit status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Numerical failures of the solver. Infeasible and unbounded programs are
/// reported through [`LpStatus`], not through this type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("pivot limit {limit} exceeded ({iterations} iterations)")]
    IterationLimit { limit: usize, iterations: usize },
    #[error("numerical breakdown: {detail}")]
    Numerical { detail: &'static str },
    #[error("malformed program: {detail}")]
    Malformed { detail: &'static str },
}

/// `min c·z` subject to `E·z = e`, `G·z ≤ g` and per-variable lower bounds
/// (`-inf` marks a free variable).
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    eq: Mat,
    eq_rhs: Vec<f64>,
    ineq: Mat,
    ineq_rhs: Vec<f64>,
    lower: Vec<f64>,
}

impl LinearProgram {
    pub fn new(
        objective: Vec<f64>,
        eq: Mat,
        eq_rhs: Vec<f64>,
        ineq: Mat,
        ineq_rhs: Vec<f64>,
        lower: Vec<f64>,
    ) -> Result<Self> {
        let nv = objective.len();
        if eq.cols() != nv || ineq.cols() != nv || lower.len() != nv {
            return Err(Error::DimensionMismatch {
                expected: nv,
                got: eq.cols().max(ineq.cols()).max(lower.len()),
            });
        }
        if eq.rows() != eq_rhs.len() || ineq.rows() != ineq_rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: eq.rows() + ineq.rows(),
                got: eq_rhs.len() + ineq_rhs.len(),
            });
        }
        let finite = objective.iter().all(|v| v.is_finite())
            && eq_rhs.iter().all(|v| v.is_finite())
            && ineq_rhs.iter().all(|v| v.is_finite())
            && eq.all_finite()
            && ineq.all_finite()
            && lower
                .iter()
                .all(|v| v.is_finite() || *v == f64::NEG_INFINITY);
        if !finite {
            return Err(Error::Solver(SolverError::Malformed {
                detail: "non-finite entry",
            }));
        }
        Ok(LinearProgram {
            objective,
            eq,
            eq_rhs,
            ineq,
            ineq_rhs,
            lower,
        })
    }

    /// Program with all variables bounded below by zero.
    pub fn nonnegative(
        objective: Vec<f64>,
        eq: Mat,
        eq_rhs: Vec<f64>,
        ineq: Mat,
        ineq_rhs: Vec<f64>,
    ) -> Result<Self> {
        let lower = vec![0.0; objective.len()];
        LinearProgram::new(objective, eq, eq_rhs, ineq, ineq_rhs, lower)
    }

    pub fn variables(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn eq(&self) -> &Mat {
        &self.eq
    }

    pub fn eq_rhs(&self) -> &[f64] {
        &self.eq_rhs
    }

    pub fn ineq(&self) -> &Mat {
        &self.ineq
    }

    pub fn ineq_rhs(&self) -> &[f64] {
        &self.ineq_rhs
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    /// Plain-text dump for solver cross-checks.
    pub fn dump(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "min {:?}", self.objective);
        for (i, r) in self.eq_rhs.iter().enumerate() {
            let _ = writeln!(s, "eq  {:?} = {r}", self.eq.row(i));
        }
        for (i, r) in self.ineq_rhs.iter().enumerate() {
            let _ = writeln!(s, "le  {:?} <= {r}", self.ineq.row(i));
        }
        let _ = writeln!(s, "lb  {:?}", self.lower);
        s
    }
}

/// Tolerances and limits for a solve.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Feasibility threshold on the phase-1 infeasibility sum.
    pub feas_tol: f64,
    /// Reduced-cost threshold for optimality.
    pub opt_tol: f64,
    /// Pivot cap; `None` picks a size-dependent default.
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feas_tol: FEAS_TOL,
            opt_tol: 1e-9,
            max_iterations: None,
        }
    }
}

/// Solution report. `primal` and the duals are empty unless the status is
/// [`LpStatus::Optimal`].
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub objective: f64,
    /// Multipliers `u` of the equality rows in `L = c·z + u·(Ez−e) + μ·(Gz−g)`.
    pub dual_eq: Vec<f64>,
    /// Multipliers `μ ≥ 0` of the inequality rows.
    pub dual_ineq: Vec<f64>,
    pub iterations: usize,
    pub primal_residual: f64,
    /// |primal − dual| / max(1, |primal|).
    pub duality_gap: f64,
    /// Largest complementary-slackness product.
    pub complementarity: f64,
}

/// Solve with default options.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    solve_with(lp, &SolverOptions::default())
}

/// Solve with explicit options. Deterministic for a fixed input.
pub fn solve_with(lp: &LinearProgram, opts: &SolverOptions) -> Result<LpSolution> {
    let raw = simplex::solve_raw(lp, opts).map_err(Error::Solver)?;
    if raw.status != LpStatus::Optimal {
        return Ok(LpSolution {
            status: raw.status,
            primal: Vec::new(),
            objective: 0.0,
            dual_eq: Vec::new(),
            dual_ineq: Vec::new(),
            iterations: raw.iterations,
            primal_residual: 0.0,
            duality_gap: 0.0,
            complementarity: 0.0,
        });
    }
    let z = raw.primal;
    let mut dual_ineq = raw.dual_ineq;
    for mu in dual_ineq.iter_mut() {
        if *mu < 0.0 && *mu > -5e-9 {
            *mu = 0.0;
        }
    }
    let dual_eq = raw.dual_eq;

    let objective = dot(lp.objective(), &z);

    // Primal residual.
    let mut primal_residual = 0.0f64;
    let ez = lp.eq.mul_vec(&z);
    for (v, r) in ez.iter().zip(&lp.eq_rhs) {
        primal_residual = primal_residual.max((v - r).abs());
    }
    let gz = lp.ineq.mul_vec(&z);
    for (v, r) in gz.iter().zip(&lp.ineq_rhs) {
        primal_residual = primal_residual.max(v - r);
    }
    for (v, lb) in z.iter().zip(&lp.lower) {
        if lb.is_finite() {
            primal_residual = primal_residual.max(lb - v);
        }
    }

    // Dual value and complementarity.
    let etu = lp.eq.mul_vec_transposed(&dual_eq);
    let gtm = lp.ineq.mul_vec_transposed(&dual_ineq);
    let mut dual_value = -dot(&dual_eq, &lp.eq_rhs) - dot(&dual_ineq, &lp.ineq_rhs);
    let mut complementarity = 0.0f64;
    for j in 0..lp.variables() {
        let red = lp.objective[j] + etu[j] + gtm[j];
        if lp.lower[j].is_finite() {
            dual_value += red * lp.lower[j];
            complementarity = complementarity.max((red * (z[j] - lp.lower[j])).abs());
        }
    }
    for (mu, (v, r)) in dual_ineq.iter().zip(gz.iter().zip(&lp.ineq_rhs)) {
        complementarity = complementarity.max((mu * (r - v)).abs());
    }
    let duality_gap = (objective - dual_value).abs() / objective.abs().max(1.0);

    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal: z,
        objective,
        dual_eq,
        dual_ineq,
        iterations: raw.iterations,
        primal_residual,
        duality_gap,
        complementarity,
    })
}

/// The free non-locality program together with its variable and row layout.
///
/// Variables: `z = [t (n entries), λ (m entries)]`.
/// Inequality rows: `0..n` carry `A·λ − t ≤ q`, `n..2n` carry
/// `−A·λ − t ≤ −q`. Equality row `0` is `Σλ = 1`.
pub struct NlProgram {
    pub lp: LinearProgram,
    pub n: usize,
    pub m: usize,
    /// Objective weights `w_j = π(x⃗(j))/2`.
    pub weights: Vec<f64>,
}

/// Build the free program whose optimum is `NL(q)` under `π`.
pub fn assemble_nl_program(
    q: &Behavior,
    a: &StrategyMatrix,
    pi: &InputDistribution,
) -> Result<NlProgram> {
    let scen = q.scenario();
    if a.scenario() != scen || pi.scenario() != scen {
        return Err(Error::ScenarioMismatch);
    }
    let n = scen.dimension();
    let m = a.columns();
    let nv = n + m;
    let ot = scen.output_tuples();

    let mut weights = vec![0.0; n];
    let mut objective = vec![0.0; nv];
    for j in 0..n {
        let w = pi.weight(j / ot) / 2.0;
        weights[j] = w;
        objective[j] = w;
    }

    let mut ineq = Mat::zeros(2 * n, nv);
    let mut ineq_rhs = vec![0.0; 2 * n];
    for j in 0..n {
        let qj = q.values()[j];
        {
            let row = ineq.row_mut(j);
            row[j] = -1.0;
            row[n..].copy_from_slice(a.row(j));
            ineq_rhs[j] = qj;
        }
        {
            let row = ineq.row_mut(n + j);
            row[j] = -1.0;
            for (dst, src) in row[n..].iter_mut().zip(a.row(j)) {
                *dst = -src;
            }
            ineq_rhs[n + j] = -qj;
        }
    }

    let mut eq = Mat::zeros(1, nv);
    for v in &mut eq.row_mut(0)[n..] {
        *v = 1.0;
    }
    let lp = LinearProgram::nonnegative(objective, eq, vec![1.0], ineq, ineq_rhs)?;
    Ok(NlProgram { lp, n, m, weights })
}

/// The constrained program and its layout.
///
/// Variables: `z = [t (n), λ (m), q (n)]`. Inequality rows as in
/// [`NlProgram`] with the behavior replaced by the `q` block. Equality
/// rows: `0` is `Σλ = 1`, `1` is `f·q = c`, then one normalization row per
/// input tuple, then the non-signaling rows.
pub struct ConstrainedNlProgram {
    pub lp: LinearProgram,
    pub n: usize,
    pub m: usize,
    pub weights: Vec<f64>,
}

/// Build the program whose optimum is the least `NL` over valid
/// non-signaling behaviors with `f·q = c`.
pub fn assemble_constrained_nl_program(
    f: &BellFunctional,
    c: f64,
    a: &StrategyMatrix,
    pi: &InputDistribution,
) -> Result<ConstrainedNlProgram> {
    let scen = f.scenario();
    if a.scenario() != scen || pi.scenario() != scen {
        return Err(Error::ScenarioMismatch);
    }
    if !c.is_finite() {
        return Err(Error::Domain(format!("functional value {c} not finite")));
    }
    let n = scen.dimension();
    let m = a.columns();
    let nv = 2 * n + m;
    let ot = scen.output_tuples();
    let q_off = n + m;

    let mut weights = vec![0.0; n];
    let mut objective = vec![0.0; nv];
    for j in 0..n {
        let w = pi.weight(j / ot) / 2.0;
        weights[j] = w;
        objective[j] = w;
    }

    let mut ineq = Mat::zeros(2 * n, nv);
    let ineq_rhs = vec![0.0; 2 * n];
    for j in 0..n {
        {
            let row = ineq.row_mut(j);
            row[j] = -1.0;
            row[n..q_off].copy_from_slice(a.row(j));
            row[q_off + j] = -1.0;
        }
        {
            let row = ineq.row_mut(n + j);
            row[j] = -1.0;
            for (dst, src) in row[n..q_off].iter_mut().zip(a.row(j)) {
                *dst = -src;
            }
            row[q_off + j] = 1.0;
        }
    }

    let ns_rows = ns_equality_rows(scen);
    let n_eq = 2 + scen.input_tuples() + ns_rows.len();
    let mut eq = Mat::zeros(n_eq, nv);
    let mut eq_rhs = vec![0.0; n_eq];
    for v in &mut eq.row_mut(0)[n..q_off] {
        *v = 1.0;
    }
    eq_rhs[0] = 1.0;
    eq.row_mut(1)[q_off..].copy_from_slice(f.coefficients());
    eq_rhs[1] = c;
    for xi in 0..scen.input_tuples() {
        let row = eq.row_mut(2 + xi);
        for ai in 0..ot {
            row[q_off + xi * ot + ai] = 1.0;
        }
        eq_rhs[2 + xi] = 1.0;
    }
    for (i, sparse) in ns_rows.iter().enumerate() {
        let row = eq.row_mut(2 + scen.input_tuples() + i);
        for &(col, v) in sparse {
            row[q_off + col] += v;
        }
    }

    let lp = LinearProgram::nonnegative(objective, eq, eq_rhs, ineq, ineq_rhs)?;
    Ok(ConstrainedNlProgram { lp, n, m, weights })
}

/// `max coeffs·q` over valid non-signaling behaviors, as a minimization.
pub fn ns_maximum_program(scenario: &Scenario, coeffs: &[f64]) -> Result<LinearProgram> {
    let n = scenario.dimension();
    if coeffs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: coeffs.len(),
        });
    }
    let ot = scenario.output_tuples();
    let ns_rows = ns_equality_rows(scenario);
    let n_eq = scenario.input_tuples() + ns_rows.len();
    let mut eq = Mat::zeros(n_eq, n);
    let mut eq_rhs = vec![0.0; n_eq];
    for xi in 0..scenario.input_tuples() {
        let row = eq.row_mut(xi);
        for ai in 0..ot {
            row[xi * ot + ai] = 1.0;
        }
        eq_rhs[xi] = 1.0;
    }
    for (i, sparse) in ns_rows.iter().enumerate() {
        let row = eq.row_mut(scenario.input_tuples() + i);
        for &(col, v) in sparse {
            row[col] += v;
        }
    }
    let objective: Vec<f64> = coeffs.iter().map(|&v| -v).collect();
    LinearProgram::nonnegative(objective, eq, eq_rhs, Mat::zeros(0, n), Vec::new())
}

/// Local-polytope membership as a pure feasibility solve.
pub fn local_feasibility(q: &Behavior, a: &StrategyMatrix) -> Result<LocalityResult> {
    let n = q.scenario().dimension();
    let m = a.columns();
    let mut eq = Mat::zeros(n + 1, m);
    let mut eq_rhs = vec![0.0; n + 1];
    for j in 0..n {
        eq.row_mut(j).copy_from_slice(a.row(j));
        eq_rhs[j] = q.values()[j];
    }
    for v in eq.row_mut(n) {
        *v = 1.0;
    }
    eq_rhs[n] = 1.0;
    let lp = LinearProgram::nonnegative(vec![0.0; m], eq, eq_rhs, Mat::zeros(0, m), Vec::new())?;
    let sol = solve(&lp)?;
    Ok(match sol.status {
        LpStatus::Optimal => LocalityResult {
            local: true,
            weights: Some(sol.primal),
        },
        _ => LocalityResult {
            local: false,
            weights: None,
        },
    })
}

/// Sparse non-signaling equality rows over a behavior-sized variable block:
/// for every party and every pair of adjacent inputs of that party, the
/// outcome marginal of the other parties must agree. Chaining adjacent
/// pairs makes all pairs agree.
pub(crate) fn ns_equality_rows(scenario: &Scenario) -> Vec<Vec<(usize, f64)>> {
    let parties = scenario.parties();
    let mut rows = Vec::new();
    for party in 0..parties {
        let m_k = scenario.inputs()[party];
        let d_k = scenario.outputs()[party];
        if m_k < 2 {
            continue;
        }
        let mut radix: Vec<usize> = Vec::new();
        for (j, &m) in scenario.inputs().iter().enumerate() {
            if j != party {
                radix.push(m);
            }
        }
        for (j, &d) in scenario.outputs().iter().enumerate() {
            if j != party {
                radix.push(d);
            }
        }
        for rest in crate::scenario::TupleIter::new_for(radix) {
            let (x_rest, a_rest) = rest.split_at(parties - 1);
            let mut x = vec![0usize; parties];
            let mut a = vec![0usize; parties];
            let mut r = 0;
            for j in 0..parties {
                if j != party {
                    x[j] = x_rest[r];
                    a[j] = a_rest[r];
                    r += 1;
                }
            }
            for xk in 0..m_k - 1 {
                let mut row = Vec::with_capacity(2 * d_k);
                for ak in 0..d_k {
                    a[party] = ak;
                    x[party] = xk;
                    row.push((scenario.flat_index(&x, &a).unwrap(), 1.0));
                    x[party] = xk + 1;
                    row.push((scenario.flat_index(&x, &a).unwrap(), -1.0));
                }
                rows.push(row);
            }
        }
    }
    rows
}
