//! Dense two-phase primal simplex on the full tableau.
//!
//! The solver is deterministic: Dantzig pricing with lowest-index
//! tie-breaking, switching permanently to Bland's rule after a long
//! degenerate stall. Equality rows get artificial variables, inequality
//! rows get slacks, free variables are split, finite lower bounds are
//! shifted to zero. After the iteration terminates the final basis is
//! refactorized with a dense LU and both primal and dual solutions are
//! recomputed from it, so the reported values do not inherit tableau
//! drift. If the refactorized basis turns out non-optimal the iteration
//! resumes with refreshed reduced costs.

use alloc::vec;
use alloc::vec::Vec;

use super::lu::Lu;
use super::{LinearProgram, LpStatus, SolverError, SolverOptions};
use crate::matrix::dot;

/// Smallest tableau entry accepted as a pivot.
const PIV_TOL: f64 = 1e-10;
/// Consecutive non-improving pivots before switching to Bland's rule.
const STALL_LIMIT: usize = 4000;
/// Maximum number of polish-and-resume rounds.
const POLISH_ROUNDS: usize = 12;

#[derive(Clone, Copy)]
enum VarMap {
    /// Standard-form column `col` equals the original variable minus `lb`.
    Shifted { col: usize, lb: f64 },
    /// Original variable equals `x[pos] - x[neg]`.
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy)]
struct RowMeta {
    /// Index into the original equality (`eq = true`) or inequality block.
    orig: usize,
    eq: bool,
    flipped: bool,
}

pub(super) struct RawSolution {
    pub status: LpStatus,
    /// Primal values for the original variables.
    pub primal: Vec<f64>,
    pub dual_eq: Vec<f64>,
    pub dual_ineq: Vec<f64>,
    pub iterations: usize,
}

pub(super) fn solve_raw(
    lp: &LinearProgram,
    opts: &SolverOptions,
) -> Result<RawSolution, SolverError> {
    let nv = lp.objective().len();
    let n_eq = lp.eq_rhs().len();
    let n_ineq = lp.ineq_rhs().len();

    // Variable mapping: shift finite lower bounds to zero, split free vars.
    let mut var_map = Vec::with_capacity(nv);
    let mut n_struct = 0usize;
    for &lb in lp.lower() {
        if lb.is_finite() {
            var_map.push(VarMap::Shifted { col: n_struct, lb });
            n_struct += 1;
        } else {
            var_map.push(VarMap::Split {
                pos: n_struct,
                neg: n_struct + 1,
            });
            n_struct += 2;
        }
    }

    // Adjusted right-hand sides and row orientations.
    let shift_term = |row: &[f64]| -> f64 {
        let mut s = 0.0;
        for (j, &c) in row.iter().enumerate() {
            if let VarMap::Shifted { lb, .. } = var_map[j] {
                if lb != 0.0 {
                    s += c * lb;
                }
            }
        }
        s
    };

    let mut row_meta = Vec::with_capacity(n_eq + n_ineq);
    let mut rhs_adj = Vec::with_capacity(n_eq + n_ineq);
    let mut n_art = 0usize;
    for i in 0..n_eq {
        let b = lp.eq_rhs()[i] - shift_term(lp.eq().row(i));
        row_meta.push(RowMeta {
            orig: i,
            eq: true,
            flipped: b < 0.0,
        });
        rhs_adj.push(b.abs());
        n_art += 1;
    }
    for i in 0..n_ineq {
        let b = lp.ineq_rhs()[i] - shift_term(lp.ineq().row(i));
        let flipped = b < 0.0;
        row_meta.push(RowMeta {
            orig: i,
            eq: false,
            flipped,
        });
        rhs_adj.push(b.abs());
        if flipped {
            n_art += 1;
        }
    }

    let m = n_eq + n_ineq;
    let first_art = n_struct + n_ineq;
    let ncols = first_art + n_art;

    // Phase-2 costs.
    let mut cost = vec![0.0; ncols];
    for (j, &c) in lp.objective().iter().enumerate() {
        match var_map[j] {
            VarMap::Shifted { col, .. } => cost[col] = c,
            VarMap::Split { pos, neg } => {
                cost[pos] = c;
                cost[neg] = -c;
            }
        }
    }

    // No constraints: the optimum sits at the lower bounds unless some
    // direction of decrease is unconstrained.
    if m == 0 {
        for j in 0..nv {
            let c = lp.objective()[j];
            let unbounded = match var_map[j] {
                VarMap::Shifted { .. } => c < -opts.opt_tol,
                VarMap::Split { .. } => c.abs() > opts.opt_tol,
            };
            if unbounded {
                return Ok(RawSolution {
                    status: LpStatus::Unbounded,
                    primal: Vec::new(),
                    dual_eq: Vec::new(),
                    dual_ineq: Vec::new(),
                    iterations: 0,
                });
            }
        }
        let primal: Vec<f64> = lp
            .lower()
            .iter()
            .map(|&lb| if lb.is_finite() { lb } else { 0.0 })
            .collect();
        return Ok(RawSolution {
            status: LpStatus::Optimal,
            primal,
            dual_eq: Vec::new(),
            dual_ineq: Vec::new(),
            iterations: 0,
        });
    }

    // Assemble the standard-form matrix and the starting basis.
    let mut a = vec![0.0; m * ncols];
    let mut basis = vec![0usize; m];
    let mut next_art = first_art;
    for r in 0..m {
        let meta = row_meta[r];
        let sgn = if meta.flipped { -1.0 } else { 1.0 };
        let src = if meta.eq {
            lp.eq().row(meta.orig)
        } else {
            lp.ineq().row(meta.orig)
        };
        let dst = &mut a[r * ncols..(r + 1) * ncols];
        for (j, &c) in src.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            match var_map[j] {
                VarMap::Shifted { col, .. } => dst[col] += sgn * c,
                VarMap::Split { pos, neg } => {
                    dst[pos] += sgn * c;
                    dst[neg] -= sgn * c;
                }
            }
        }
        if !meta.eq {
            dst[n_struct + meta.orig] = sgn;
        }
        if meta.eq || meta.flipped {
            dst[next_art] = 1.0;
            basis[r] = next_art;
            next_art += 1;
        } else {
            basis[r] = n_struct + meta.orig;
        }
    }
    debug_assert_eq!(next_art, ncols);

    let max_iters = opts.max_iterations.unwrap_or(60 * (m + ncols) + 20_000);

    let mut w = Worker {
        m,
        ncols,
        first_art,
        a,
        b: rhs_adj,
        cost,
        tab: Vec::new(),
        rhs: Vec::new(),
        red: vec![0.0; ncols],
        obj: 0.0,
        basis,
        in_basis: vec![usize::MAX; ncols],
        row_meta,
        scratch: vec![0.0; ncols],
        opt_tol: opts.opt_tol,
        bland: false,
        stall: 0,
        iterations: 0,
        max_iters,
    };
    w.tab = w.a.clone();
    w.rhs = w.b.clone();
    for r in 0..m {
        w.in_basis[w.basis[r]] = r;
    }

    // Phase 1: minimize the sum of artificial variables.
    let any_art = ncols > first_art;
    if any_art {
        w.reset_reduced_costs(true);
        if w.iterate(true)? == Outcome::Unbounded {
            return Err(SolverError::Numerical {
                detail: "phase 1 reported unbounded",
            });
        }
        let infeas: f64 = (0..w.m)
            .filter(|&r| w.basis[r] >= w.first_art)
            .map(|r| w.rhs[r].max(0.0))
            .sum();
        if infeas > opts.feas_tol {
            return Ok(RawSolution {
                status: LpStatus::Infeasible,
                primal: Vec::new(),
                dual_eq: Vec::new(),
                dual_ineq: Vec::new(),
                iterations: w.iterations,
            });
        }
        w.remove_artificials_from_basis();
    }

    // Phase 2 with polish-and-resume.
    w.bland = false;
    w.stall = 0;
    w.reset_reduced_costs(false);
    let mut rounds = 0usize;
    loop {
        if w.iterate(false)? == Outcome::Unbounded {
            return Ok(RawSolution {
                status: LpStatus::Unbounded,
                primal: Vec::new(),
                dual_eq: Vec::new(),
                dual_ineq: Vec::new(),
                iterations: w.iterations,
            });
        }
        rounds += 1;
        match w.polish()? {
            Polish::Verified { x_basic, y } => {
                return Ok(w.extract(nv, n_eq, n_ineq, &var_map, x_basic, y));
            }
            Polish::Resume => {
                if rounds >= POLISH_ROUNDS {
                    return Err(SolverError::Numerical {
                        detail: "optimality could not be stabilized",
                    });
                }
            }
        }
    }
}

#[derive(PartialEq)]
enum Outcome {
    Done,
    Unbounded,
}

enum Polish {
    Verified { x_basic: Vec<f64>, y: Vec<f64> },
    Resume,
}

struct Worker {
    m: usize,
    ncols: usize,
    first_art: usize,
    /// Standard-form constraint matrix, kept pristine for refactorization.
    a: Vec<f64>,
    b: Vec<f64>,
    cost: Vec<f64>,
    /// Working tableau `B⁻¹A` and right-hand side `B⁻¹b`.
    tab: Vec<f64>,
    rhs: Vec<f64>,
    red: Vec<f64>,
    obj: f64,
    basis: Vec<usize>,
    in_basis: Vec<usize>,
    row_meta: Vec<RowMeta>,
    scratch: Vec<f64>,
    opt_tol: f64,
    bland: bool,
    stall: usize,
    iterations: usize,
    max_iters: usize,
}

impl Worker {
    fn phase_cost(&self, j: usize, phase1: bool) -> f64 {
        if phase1 {
            if j >= self.first_art {
                1.0
            } else {
                0.0
            }
        } else {
            self.cost[j]
        }
    }

    fn reset_reduced_costs(&mut self, phase1: bool) {
        for j in 0..self.ncols {
            self.red[j] = self.phase_cost(j, phase1);
        }
        self.obj = 0.0;
        for r in 0..self.m {
            let cb = self.phase_cost(self.basis[r], phase1);
            if cb == 0.0 {
                continue;
            }
            self.obj += cb * self.rhs[r];
            let row = &self.tab[r * self.ncols..(r + 1) * self.ncols];
            for (red, &t) in self.red.iter_mut().zip(row) {
                *red -= cb * t;
            }
        }
        for r in 0..self.m {
            self.red[self.basis[r]] = 0.0;
        }
    }

    fn iterate(&mut self, phase1: bool) -> Result<Outcome, SolverError> {
        loop {
            let Some(pc) = self.price() else {
                return Ok(Outcome::Done);
            };
            let Some(pr) = self.ratio_test(pc) else {
                return if phase1 {
                    Err(SolverError::Numerical {
                        detail: "phase 1 ratio test failed",
                    })
                } else {
                    Ok(Outcome::Unbounded)
                };
            };
            let before = self.obj;
            self.pivot(pr, pc);
            self.iterations += 1;
            if self.iterations > self.max_iters {
                return Err(SolverError::IterationLimit {
                    limit: self.max_iters,
                    iterations: self.iterations,
                });
            }
            if self.obj < before - 1e-13 * (1.0 + before.abs()) {
                self.stall = 0;
            } else {
                self.stall += 1;
                if self.stall > STALL_LIMIT {
                    self.bland = true;
                }
            }
        }
    }

    /// Entering column, or `None` when the phase is optimal. Artificial
    /// columns never re-enter.
    fn price(&self) -> Option<usize> {
        if self.bland {
            (0..self.first_art)
                .find(|&j| self.in_basis[j] == usize::MAX && self.red[j] < -self.opt_tol)
        } else {
            let mut best: Option<(f64, usize)> = None;
            for j in 0..self.first_art {
                if self.in_basis[j] != usize::MAX {
                    continue;
                }
                let r = self.red[j];
                if r < -self.opt_tol && best.is_none_or(|(b, _)| r < b) {
                    best = Some((r, j));
                }
            }
            best.map(|(_, j)| j)
        }
    }

    fn ratio_test(&self, pc: usize) -> Option<usize> {
        let mut best: Option<(f64, f64, usize, usize)> = None; // ratio, piv, basis var, row
        for r in 0..self.m {
            let a = self.tab[r * self.ncols + pc];
            if a <= PIV_TOL {
                continue;
            }
            let ratio = (self.rhs[r] / a).max(0.0);
            match best {
                None => best = Some((ratio, a, self.basis[r], r)),
                Some((br, bp, bv, _)) => {
                    let tol = 1e-10 * (1.0 + br.abs());
                    if ratio < br - tol {
                        best = Some((ratio, a, self.basis[r], r));
                    } else if ratio <= br + tol {
                        let replace = if self.bland {
                            self.basis[r] < bv
                        } else {
                            a > bp || (a == bp && self.basis[r] < bv)
                        };
                        if replace {
                            best = Some((br.min(ratio), a, self.basis[r], r));
                        }
                    }
                }
            }
        }
        best.map(|(_, _, _, r)| r)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let ncols = self.ncols;
        let piv = self.tab[pr * ncols + pc];
        let inv = 1.0 / piv;
        {
            let row = &mut self.tab[pr * ncols..(pr + 1) * ncols];
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[pc] = 1.0;
            self.scratch.copy_from_slice(row);
        }
        self.rhs[pr] *= inv;
        if self.rhs[pr] < 0.0 && self.rhs[pr] > -1e-11 {
            self.rhs[pr] = 0.0;
        }
        let theta = self.rhs[pr];

        for r in 0..self.m {
            if r == pr {
                continue;
            }
            let f = self.tab[r * ncols + pc];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.tab[r * ncols..(r + 1) * ncols];
            for (v, &p) in row.iter_mut().zip(self.scratch.iter()) {
                *v -= f * p;
            }
            row[pc] = 0.0;
            self.rhs[r] -= f * theta;
            if self.rhs[r] < 0.0 && self.rhs[r] > -1e-11 {
                self.rhs[r] = 0.0;
            }
        }

        let f = self.red[pc];
        if f != 0.0 {
            self.obj += f * theta;
            for (v, &p) in self.red.iter_mut().zip(self.scratch.iter()) {
                *v -= f * p;
            }
        }
        self.red[pc] = 0.0;

        self.in_basis[self.basis[pr]] = usize::MAX;
        self.basis[pr] = pc;
        self.in_basis[pc] = pr;
    }

    /// Pivot every artificial variable out of the basis, deleting rows that
    /// turn out linearly dependent.
    fn remove_artificials_from_basis(&mut self) {
        let ncols = self.ncols;
        let mut delete = Vec::new();
        for r in 0..self.m {
            if self.basis[r] < self.first_art {
                continue;
            }
            let mut pc = usize::MAX;
            let mut best = 1e-7;
            for j in 0..self.first_art {
                if self.in_basis[j] != usize::MAX {
                    continue;
                }
                let v = self.tab[r * ncols + j].abs();
                if v > best {
                    best = v;
                    pc = j;
                }
            }
            if pc != usize::MAX {
                // Degenerate pivot: the artificial sits at (numerical) zero,
                // so any sign of pivot element keeps feasibility.
                self.rhs[r] = self.rhs[r].max(0.0);
                self.pivot(r, pc);
            } else {
                delete.push(r);
            }
        }
        if !delete.is_empty() {
            self.delete_rows(&delete);
        }
    }

    fn delete_rows(&mut self, rows: &[usize]) {
        let ncols = self.ncols;
        let mut keep = vec![true; self.m];
        for &r in rows {
            keep[r] = false;
        }
        let mut dst = 0usize;
        for src in 0..self.m {
            if !keep[src] {
                continue;
            }
            if dst != src {
                self.tab
                    .copy_within(src * ncols..(src + 1) * ncols, dst * ncols);
                self.a
                    .copy_within(src * ncols..(src + 1) * ncols, dst * ncols);
                self.rhs[dst] = self.rhs[src];
                self.b[dst] = self.b[src];
                self.basis[dst] = self.basis[src];
                self.row_meta[dst] = self.row_meta[src];
            }
            dst += 1;
        }
        self.m = dst;
        self.tab.truncate(dst * ncols);
        self.a.truncate(dst * ncols);
        self.rhs.truncate(dst);
        self.b.truncate(dst);
        self.basis.truncate(dst);
        self.row_meta.truncate(dst);
        for v in self.in_basis.iter_mut() {
            *v = usize::MAX;
        }
        for r in 0..self.m {
            self.in_basis[self.basis[r]] = r;
        }
    }

    /// Refactorize the basis; either confirm optimality and return exact
    /// basic values and duals, or refresh the iteration state and resume.
    fn polish(&mut self) -> Result<Polish, SolverError> {
        if self.m == 0 {
            return Ok(Polish::Verified {
                x_basic: Vec::new(),
                y: Vec::new(),
            });
        }
        let ncols = self.ncols;
        let lu = Lu::factor(self.m, |c, out| {
            let col = self.basis[c];
            for (r, o) in out.iter_mut().enumerate() {
                *o = self.a[r * ncols + col];
            }
        })
        .map_err(|_| SolverError::Numerical {
            detail: "singular basis at refactorization",
        })?;

        let mut x_basic = lu.solve(&self.b);
        for v in x_basic.iter_mut() {
            if *v < 0.0 {
                if *v < -1e-7 {
                    return Err(SolverError::Numerical {
                        detail: "refactorized basis lost primal feasibility",
                    });
                }
                *v = 0.0;
            }
        }
        let cb: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
        let y = lu.solve_transposed(&cb);

        // Exact reduced costs; artificials are excluded from pricing anyway.
        let mut worst = 0.0f64;
        let mut red = vec![0.0; ncols];
        for j in 0..self.first_art {
            if self.in_basis[j] != usize::MAX {
                continue;
            }
            let mut acc = self.cost[j];
            for r in 0..self.m {
                acc -= y[r] * self.a[r * ncols + j];
            }
            red[j] = acc;
            if acc < worst {
                worst = acc;
            }
        }
        if worst < -10.0 * self.opt_tol {
            // Resume with exact data on the drifted tableau.
            self.red = red;
            self.rhs.copy_from_slice(&x_basic);
            self.obj = dot(&cb, &x_basic);
            self.bland = true;
            self.stall = 0;
            return Ok(Polish::Resume);
        }
        Ok(Polish::Verified { x_basic, y })
    }

    fn extract(
        &self,
        nv: usize,
        n_eq: usize,
        n_ineq: usize,
        var_map: &[VarMap],
        x_basic: Vec<f64>,
        y: Vec<f64>,
    ) -> RawSolution {
        let mut x_std = vec![0.0; self.ncols];
        for r in 0..self.m {
            x_std[self.basis[r]] = x_basic[r];
        }
        let mut primal = vec![0.0; nv];
        for (j, map) in var_map.iter().enumerate() {
            primal[j] = match *map {
                VarMap::Shifted { col, lb } => x_std[col] + lb,
                VarMap::Split { pos, neg } => x_std[pos] - x_std[neg],
            };
        }
        let mut dual_eq = vec![0.0; n_eq];
        let mut dual_ineq = vec![0.0; n_ineq];
        for r in 0..self.m {
            let meta = self.row_meta[r];
            let d = if meta.flipped { y[r] } else { -y[r] };
            if meta.eq {
                dual_eq[meta.orig] = d;
            } else {
                dual_ineq[meta.orig] = d;
            }
        }
        RawSolution {
            status: LpStatus::Optimal,
            primal,
            dual_eq,
            dual_ineq,
            iterations: self.iterations,
        }
    }
}
