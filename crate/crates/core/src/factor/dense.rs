//! Dense Cholesky and LU factorizations.

use crate::error::{check_dim, Error, Result};
use crate::sparse::DenseMatrix;

/// Symmetry tolerance (relative to ‖M‖_F) accepted by the dense Cholesky.
pub const DENSE_SYMMETRY_TOL: f64 = 1e-12;

/// `M = LLᵀ` for a dense SPD matrix.
#[derive(Debug, Clone)]
pub struct DenseCholesky {
    l: DenseMatrix,
}

impl DenseCholesky {
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidInput("Cholesky needs a square matrix".into()));
        }
        let asym = m.relative_asymmetry();
        if asym > DENSE_SYMMETRY_TOL {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let n = m.nrows();
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = m[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let ljj = d.sqrt();
            l[(j, j)] = ljj;
            for i in j + 1..n {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Lower-triangular factor.
    pub fn l(&self) -> &DenseMatrix {
        &self.l
    }

    /// Solves `Ly = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[(i, k)] * b[k];
            }
            b[i] = s / self.l[(i, i)];
        }
    }

    /// Solves `Lᵀx = b` in place.
    pub fn solve_upper_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        for i in (0..n).rev() {
            let col = self.l.column(i);
            let mut s = b[i];
            for k in i + 1..n {
                s -= col[k] * b[k];
            }
            b[i] = s / col[i];
        }
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        self.solve_lower_in_place(b);
        self.solve_upper_in_place(b);
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_dim("dense Cholesky solve", self.dim(), b.len())?;
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    /// `LLᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        self.l.matmul(&self.l.transpose()).expect("square factor")
    }

    /// `log det M = 2 Σ log lᵢᵢ`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.l.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }
}

/// `PM = LU` with partial pivoting.
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: DenseMatrix,
    pivots: Vec<usize>,
}

impl DenseLu {
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidInput("LU needs a square matrix".into()));
        }
        let n = m.nrows();
        let mut lu = m.clone();
        let mut pivots = vec![0; n];
        let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
        for j in 0..n {
            let mut p = j;
            let mut best = lu[(j, j)].abs();
            for i in j + 1..n {
                if lu[(i, j)].abs() > best {
                    best = lu[(i, j)].abs();
                    p = i;
                }
            }
            if best <= f64::EPSILON * scale * 1e-3 {
                return Err(Error::ZeroPivot { index: j });
            }
            pivots[j] = p;
            if p != j {
                for c in 0..n {
                    let t = lu[(j, c)];
                    lu[(j, c)] = lu[(p, c)];
                    lu[(p, c)] = t;
                }
            }
            let d = lu[(j, j)];
            for i in j + 1..n {
                lu[(i, j)] /= d;
            }
            for c in j + 1..n {
                let ujc = lu[(j, c)];
                if ujc == 0.0 {
                    continue;
                }
                for i in j + 1..n {
                    let lij = lu[(i, j)];
                    lu[(i, c)] -= lij * ujc;
                }
            }
        }
        Ok(Self { lu, pivots })
    }

    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        for j in 0..n {
            b.swap(j, self.pivots[j]);
        }
        for j in 0..n {
            let bj = b[j];
            if bj != 0.0 {
                for i in j + 1..n {
                    b[i] -= self.lu[(i, j)] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.lu[(j, j)];
            let bj = b[j];
            if bj != 0.0 {
                for i in 0..j {
                    b[i] -= self.lu[(i, j)] * bj;
                }
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_dim("dense LU solve", self.dim(), b.len())?;
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    /// `M⁻¹` assembled column by column.
    pub fn inverse(&self) -> DenseMatrix {
        let n = self.dim();
        let mut inv = DenseMatrix::identity(n);
        for j in 0..n {
            self.solve_in_place(inv.column_mut(j));
        }
        inv
    }

    /// Solves `M X = B` for a dense right-hand side block.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim("dense LU solve_matrix", self.dim(), b.nrows())?;
        let mut x = b.clone();
        for j in 0..x.ncols() {
            self.solve_in_place(x.column_mut(j));
        }
        Ok(x)
    }
}
