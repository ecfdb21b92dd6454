//! Dense LU factorization with partial pivoting, used to refresh the
//! simplex basis to full precision.

use alloc::vec;
use alloc::vec::Vec;

pub(crate) struct Lu {
    n: usize,
    /// Packed L (unit diagonal, below) and U (diagonal and above).
    lu: Vec<f64>,
    perm: Vec<usize>,
}

pub(crate) enum LuError {
    Singular,
}

impl Lu {
    /// Factor a dense column-major n x n matrix given by a column accessor.
    pub(crate) fn factor(
        n: usize,
        mut column: impl FnMut(usize, &mut [f64]),
    ) -> Result<Lu, LuError> {
        let mut lu = vec![0.0; n * n];
        let mut col = vec![0.0; n];
        // Store row-major for cache-friendly elimination.
        for c in 0..n {
            column(c, &mut col);
            for r in 0..n {
                lu[r * n + c] = col[r];
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            // Pivot search in column k, rows k..n.
            let mut best = k;
            let mut best_abs = lu[k * n + k].abs();
            for r in k + 1..n {
                let v = lu[r * n + k].abs();
                if v > best_abs {
                    best_abs = v;
                    best = r;
                }
            }
            if best_abs < 1e-13 {
                return Err(LuError::Singular);
            }
            if best != k {
                for c in 0..n {
                    lu.swap(k * n + c, best * n + c);
                }
                perm.swap(k, best);
            }
            let piv = lu[k * n + k];
            for r in k + 1..n {
                let f = lu[r * n + k] / piv;
                lu[r * n + k] = f;
                if f != 0.0 {
                    for c in k + 1..n {
                        lu[r * n + c] -= f * lu[k * n + c];
                    }
                }
            }
        }
        Ok(Lu { n, lu, perm })
    }

    /// Solve `B x = b` where `B` is the factored matrix.
    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // Forward: L y = Pb.
        for r in 1..n {
            let mut acc = x[r];
            for c in 0..r {
                acc -= self.lu[r * n + c] * x[c];
            }
            x[r] = acc;
        }
        // Backward: U x = y.
        for r in (0..n).rev() {
            let mut acc = x[r];
            for c in r + 1..n {
                acc -= self.lu[r * n + c] * x[c];
            }
            x[r] = acc / self.lu[r * n + r];
        }
        x
    }

    /// Solve `Bᵀ y = c`.
    pub(crate) fn solve_transposed(&self, c: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = c.to_vec();
        // Uᵀ z = c (forward).
        for r in 0..n {
            let mut acc = y[r];
            for k in 0..r {
                acc -= self.lu[k * n + r] * y[k];
            }
            y[r] = acc / self.lu[r * n + r];
        }
        // Lᵀ w = z (backward).
        for r in (0..n).rev() {
            let mut acc = y[r];
            for k in r + 1..n {
                acc -= self.lu[k * n + r] * y[k];
            }
            y[r] = acc;
        }
        // Undo the permutation: solved (PB)ᵀ... B = P⁻¹(PB), so
        // Bᵀ y = (PB)ᵀ (P y); return P⁻¹-scattered w.
        let mut out = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            out[p] = y[k];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // B = [[2, 1], [1, 3]]
        let cols = [[2.0, 1.0], [1.0, 3.0]];
        let lu = Lu::factor(2, |c, out| out.copy_from_slice(&cols[c]))
            .ok()
            .unwrap();
        let x = lu.solve(&[5.0, 10.0]);
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
        let y = lu.solve_transposed(&[4.0, 7.0]);
        // Bᵀ y = [2y0 + y1, y0 + 3y1] = [4, 7] → y = [1, 2]
        assert!((y[0] - 1.0).abs() < 1e-12);
        assert!((y[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let cols = [[0.0, 1.0], [1.0, 0.0]];
        let lu = Lu::factor(2, |c, out| out.copy_from_slice(&cols[c]))
            .ok()
            .unwrap();
        let x = lu.solve(&[3.0, 4.0]);
        assert!((x[0] - 4.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn reports_singular() {
        let cols = [[1.0, 2.0], [2.0, 4.0]];
        assert!(Lu::factor(2, |c, out| out.copy_from_slice(&cols[c])).is_err());
    }
}
