//! Builders for the three application families of low-rank updated systems.

use crate::error::{check_dim, Error, Result};
use crate::operator::LowRankUpdatedOperator;
use crate::sparse::{CsrMatrix, DenseMatrix, TallMatrix};

fn require_positive(name: &str, v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !(*x > 0.0) || !x.is_finite()) {
        Some(i) => Err(Error::InvalidInput(format!(
            "{name}[{i}] = {} must be positive",
            v[i]
        ))),
        None => Ok(()),
    }
}

/// Augmented Lagrangian (1,1) block `A + γBᵀW⁻¹B`, with `U = BᵀW⁻¹ᐟ²` stored sparse.
///
/// `b` is k×n and `w_diag` holds the k positive weights.
pub fn from_augmented_lagrangian(
    a: CsrMatrix,
    b: &CsrMatrix,
    w_diag: &[f64],
    gamma: f64,
) -> Result<LowRankUpdatedOperator> {
    check_dim("augmented Lagrangian: W length", b.nrows(), w_diag.len())?;
    check_dim("augmented Lagrangian: B columns", a.ncols(), b.ncols())?;
    require_positive("W", w_diag)?;
    let inv_sqrt: Vec<f64> = w_diag.iter().map(|w| 1.0 / w.sqrt()).collect();
    let u = b.transpose().scale_rows_cols(None, Some(&inv_sqrt));
    LowRankUpdatedOperator::new(a, TallMatrix::Sparse(u), gamma)
}

/// Interior-point Schur complement `H + CᵀZ⁻¹ΛC`: `γ = 1`, `U = Cᵀ(Z⁻¹Λ)¹ᐟ²`.
pub fn from_kkt_schur(
    h: CsrMatrix,
    c: &CsrMatrix,
    z: &[f64],
    lambda: &[f64],
) -> Result<LowRankUpdatedOperator> {
    check_dim("KKT Schur: z length", c.nrows(), z.len())?;
    check_dim("KKT Schur: lambda length", c.nrows(), lambda.len())?;
    check_dim("KKT Schur: C columns", h.ncols(), c.ncols())?;
    require_positive("z", z)?;
    require_positive("lambda", lambda)?;
    let w: Vec<f64> = z.iter().zip(lambda).map(|(z, l)| (l / z).sqrt()).collect();
    let u = c.transpose().scale_rows_cols(None, Some(&w));
    LowRankUpdatedOperator::new(h, TallMatrix::Sparse(u), 1.0)
}

/// Maps a stacked right-hand side `c = [c₁; c₂]` to `B₁ᵀc₁ + B₂ᵀc₂`.
#[derive(Debug, Clone)]
pub struct NormalEquationsRhs {
    b1: CsrMatrix,
    b2: DenseMatrix,
}

impl NormalEquationsRhs {
    pub fn build(&self, c: &[f64]) -> Result<Vec<f64>> {
        let m1 = self.b1.nrows();
        check_dim("normal equations rhs", m1 + self.b2.nrows(), c.len())?;
        let mut r = self.b1.spmv(&c[..m1], true)?;
        let r2 = self.b2.matvec(&c[m1..], true)?;
        for (a, b) in r.iter_mut().zip(&r2) {
            *a += b;
        }
        Ok(r)
    }
}

/// Normal equations of `min ‖Bx − c‖` with `B = [B₁; B₂]`, `B₁` sparse and
/// `B₂` dense: `A = B₁ᵀB₁` (assembled sparse), `U = B₂ᵀ`, `γ = 1`.
pub fn from_normal_equations(
    b1: &CsrMatrix,
    b2: &DenseMatrix,
) -> Result<(LowRankUpdatedOperator, NormalEquationsRhs)> {
    check_dim("normal equations: B2 columns", b1.ncols(), b2.ncols())?;
    let a = b1.transpose().matmul(b1)?;
    let op = LowRankUpdatedOperator::new(a, TallMatrix::Dense(b2.transpose()), 1.0)?;
    Ok((
        op,
        NormalEquationsRhs {
            b1: b1.clone(),
            b2: b2.clone(),
        },
    ))
}
