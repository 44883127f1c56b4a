//! Sherman–Morrison–Woodbury solver for `αI + γUUᵀ`.

use crate::error::{check_dim, Error, Result};
use crate::factor::{DenseCholesky, SparseCholesky, DENSE_SMW_THRESHOLD};
use crate::sparse::{amd_ordering, CsrMatrix, DenseMatrix, Gram, TallMatrix};

#[derive(Debug, Clone)]
enum Inner {
    Dense { m: DenseMatrix, chol: DenseCholesky },
    Sparse { m: CsrMatrix, chol: SparseCholesky },
}

/// Applies `(αIₙ + γUUᵀ)⁻¹ = α⁻¹Iₙ − α⁻¹γU(αI_k + γUᵀU)⁻¹Uᵀ`.
///
/// The k×k matrix is factorized once: dense Cholesky for `k <= 512`,
/// sparse Cholesky with AMD ordering otherwise.
#[derive(Debug, Clone)]
pub struct SmwSolver {
    alpha: f64,
    gamma: f64,
    u: TallMatrix,
    inner: Inner,
}

impl SmwSolver {
    pub fn build(u: &TallMatrix, alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidInput(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        let k = u.ncols();
        let inner = match u.gram() {
            Gram::Dense(g) => dense_inner(g, alpha, gamma)?,
            Gram::Sparse(g) if k <= DENSE_SMW_THRESHOLD => dense_inner(g.to_dense(), alpha, gamma)?,
            Gram::Sparse(g) => {
                let m = g.scale(gamma).add_diagonal(alpha);
                let perm = amd_ordering(&m);
                let chol = SparseCholesky::factor(&m, &perm)?;
                Inner::Sparse { m, chol }
            }
        };
        Ok(Self {
            alpha,
            gamma,
            u: u.clone(),
            inner,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn k(&self) -> usize {
        self.u.ncols()
    }

    pub fn u(&self) -> &TallMatrix {
        &self.u
    }

    /// Whether the k×k system is handled by the sparse factorization.
    pub fn is_sparse_inner(&self) -> bool {
        matches!(self.inner, Inner::Sparse { .. })
    }

    /// `‖LLᵀ − M‖_F / ‖M‖_F` for the factorized k×k matrix `M` (in its
    /// factorization ordering).
    pub fn inner_factor_error(&self) -> f64 {
        match &self.inner {
            Inner::Dense { m, chol } => {
                let r = chol.reconstruct();
                let mut diff = 0.0;
                for j in 0..m.ncols() {
                    for i in 0..m.nrows() {
                        diff += (r[(i, j)] - m[(i, j)]).powi(2);
                    }
                }
                diff.sqrt() / m.frobenius_norm()
            }
            Inner::Sparse { m, chol } => {
                let pm = m
                    .permute_symmetric(chol.perm())
                    .expect("factor ordering matches")
                    .to_dense();
                let l = chol.l();
                let llt = l.matmul(&l.transpose()).expect("square factor").to_dense();
                let mut diff = 0.0;
                for j in 0..pm.ncols() {
                    for i in 0..pm.nrows() {
                        diff += (llt[(i, j)] - pm[(i, j)]).powi(2);
                    }
                }
                diff.sqrt() / pm.frobenius_norm()
            }
        }
    }

    /// `t ← (αI_k + γUᵀU)⁻¹t`.
    pub fn solve_inner_in_place(&self, t: &mut [f64]) {
        match &self.inner {
            Inner::Dense { chol, .. } => chol.solve_in_place(t),
            Inner::Sparse { chol, .. } => {
                let x = chol.solve(t).expect("length checked by caller");
                t.copy_from_slice(&x);
            }
        }
    }

    /// `z = (αI + γUUᵀ)⁻¹r`; `r` and `z` have length n.
    pub fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        let mut t = vec![0.0; self.k()];
        self.u.mul_transpose_into(r, &mut t);
        self.solve_inner_in_place(&mut t);
        self.u.mul_into(&t, z);
        let inv_alpha = 1.0 / self.alpha;
        for (zi, ri) in z.iter_mut().zip(r) {
            *zi = (ri - self.gamma * *zi) * inv_alpha;
        }
    }

    pub fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_dim("SMW apply", self.n(), r.len())?;
        let mut z = vec![0.0; r.len()];
        self.apply_into(r, &mut z);
        Ok(z)
    }

    /// `(αI + γUUᵀ)x`, the forward map.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let t = self.u.apply(x, true)?;
        let ut = self.u.apply(&t, false)?;
        Ok(x.iter()
            .zip(&ut)
            .map(|(xi, wi)| self.alpha * xi + self.gamma * wi)
            .collect())
    }
}

fn dense_inner(g: DenseMatrix, alpha: f64, gamma: f64) -> Result<Inner> {
    let mut m = g.scale(gamma).add_diagonal(alpha);
    // Symmetrize away rounding in the Gram product.
    for j in 0..m.ncols() {
        for i in 0..j {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let chol = DenseCholesky::factor(&m)?;
    Ok(Inner::Dense { m, chol })
}
