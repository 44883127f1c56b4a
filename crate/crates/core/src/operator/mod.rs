//! The matrix-free coefficient operator `A_γ = A + γUUᵀ`.

mod builders;

pub use builders::{
    from_augmented_lagrangian, from_kkt_schur, from_normal_equations, NormalEquationsRhs,
};

use crate::error::{check_dim, Error, Result};
use crate::rng;
use crate::sparse::{two_norm_estimate, CsrMatrix, DenseMatrix, TallMatrix, NORM_MAXIT};

/// Default size cap for dense assembly.
pub const DEFAULT_DENSE_CAP: usize = 2000;

/// A square linear map applied without assembly.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y = Op·x`; lengths must already match `dim()`.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("operator apply", self.dim(), x.len())?;
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        Ok(y)
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.mul_into(x, y)
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.mul_into(x, y)
    }
}

/// `A + γUUᵀ`, optionally symmetrically scaled as `S⁻¹(A + γUUᵀ)S⁻¹` with a
/// positive diagonal `S`.
#[derive(Debug, Clone)]
pub struct LowRankUpdatedOperator {
    a: CsrMatrix,
    u: TallMatrix,
    gamma: f64,
    scaling: Option<Vec<f64>>,
}

/// Norms used to rescale a problem to `‖A‖₂ = ‖U‖₂ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NormalizationRecord {
    pub norm_a: f64,
    pub norm_u: f64,
    /// `γ‖U‖₂² / ‖A‖₂`.
    pub gamma_tilde: f64,
    pub converged: bool,
}

impl LowRankUpdatedOperator {
    pub fn new(a: CsrMatrix, u: impl Into<TallMatrix>, gamma: f64) -> Result<Self> {
        let u = u.into();
        if a.nrows() != a.ncols() {
            return Err(Error::InvalidInput(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        check_dim("U rows", a.nrows(), u.nrows())?;
        if u.ncols() == 0 || u.ncols() >= a.nrows() {
            return Err(Error::InvalidInput(format!(
                "U must have 1 <= k < n columns (k = {}, n = {})",
                u.ncols(),
                a.nrows()
            )));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if !a.is_finite() || !u.is_finite() {
            return Err(Error::InvalidInput("A and U must be finite".into()));
        }
        Ok(Self {
            a,
            u,
            gamma,
            scaling: None,
        })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn k(&self) -> usize {
        self.u.ncols()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The unscaled `A`.
    pub fn a(&self) -> &CsrMatrix {
        &self.a
    }

    /// The unscaled `U`.
    pub fn u(&self) -> &TallMatrix {
        &self.u
    }

    /// Diagonal `S` of the symmetric scaling, if any.
    pub fn scaling(&self) -> Option<&[f64]> {
        self.scaling.as_deref()
    }

    /// `S⁻¹AS⁻¹` (or `A` when unscaled).
    pub fn effective_a(&self) -> CsrMatrix {
        match &self.scaling {
            Some(s) => {
                let inv: Vec<f64> = s.iter().map(|v| 1.0 / v).collect();
                self.a.scale_rows_cols(Some(&inv), Some(&inv))
            }
            None => self.a.clone(),
        }
    }

    /// `S⁻¹U` (or `U` when unscaled).
    pub fn effective_u(&self) -> TallMatrix {
        match &self.scaling {
            Some(s) => {
                let inv: Vec<f64> = s.iter().map(|v| 1.0 / v).collect();
                self.u.scale_rows(&inv).expect("scaling has length n")
            }
            None => self.u.clone(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.a.is_symmetric(1e-14)
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply_vec(x)
    }

    /// Exact diagonal `aᵢᵢ + γ‖uᵢᵀ‖²` of the (scaled) operator.
    pub fn diag_gamma(&self) -> Vec<f64> {
        let a = self.a.diagonal();
        let u = self.u.row_norms_sq();
        let mut d: Vec<f64> = a.iter().zip(&u).map(|(a, u)| a + self.gamma * u).collect();
        if let Some(s) = &self.scaling {
            for (di, si) in d.iter_mut().zip(s) {
                *di /= si * si;
            }
        }
        d
    }

    /// Returns the operator scaled to unit diagonal, `D⁻¹ᐟ²A_γD⁻¹ᐟ²`.
    pub fn with_diagonal_scaling(&self) -> Result<Self> {
        let d = self.diag_gamma();
        if let Some((i, v)) = d.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "diagonal entry {i} of A_gamma is {v}, cannot scale"
            )));
        }
        let mut s: Vec<f64> = d.iter().map(|v| v.sqrt()).collect();
        if let Some(old) = &self.scaling {
            for (si, oi) in s.iter_mut().zip(old) {
                *si *= oi;
            }
        }
        Ok(Self {
            scaling: Some(s),
            ..self.clone()
        })
    }

    /// Rescales to `‖A‖₂ = ‖U‖₂ = 1`: returns `A/‖A‖₂`, `U/‖U‖₂` and
    /// `γ̃ = γ‖U‖₂²/‖A‖₂`, so the new operator equals the old one divided by
    /// `‖A‖₂`. Scaling, if present, is folded into the returned matrices.
    pub fn normalize(&self, tol: f64) -> Result<(Self, NormalizationRecord)> {
        let a = self.effective_a();
        let u = self.effective_u();
        let na = two_norm_estimate(&a, tol, NORM_MAXIT);
        let nu = two_norm_estimate(&u, tol, NORM_MAXIT);
        if na.value == 0.0 {
            return Err(Error::InvalidInput("cannot normalize: A is zero".into()));
        }
        if nu.value == 0.0 {
            return Err(Error::InvalidInput("cannot normalize: U is zero".into()));
        }
        let gamma_tilde = self.gamma * nu.value * nu.value / na.value;
        let op = Self::new(
            a.scale(1.0 / na.value),
            u.scale(1.0 / nu.value),
            gamma_tilde,
        )?;
        Ok((
            op,
            NormalizationRecord {
                norm_a: na.value,
                norm_u: nu.value,
                gamma_tilde,
                converged: na.converged && nu.converged,
            },
        ))
    }

    /// Dense `A_γ` (scaled if scaling is set). Errors when `n > cap`.
    pub fn assemble_dense(&self, cap: usize) -> Result<DenseMatrix> {
        let n = self.n();
        if n > cap {
            return Err(Error::SizeCap { n, cap });
        }
        let a = self.effective_a().to_dense();
        let u = self.effective_u().to_dense();
        let uut = u.matmul(&u.transpose())?;
        a.add(&uut.scale(self.gamma))
    }

    /// Randomized check that `xᵀA_γx > 0` for `samples` seeded directions.
    pub fn probe_positive_definite(&self, samples: usize, seed: u64) -> bool {
        let mut r = rng::seeded(seed);
        let mut y = vec![0.0; self.n()];
        (0..samples).all(|_| {
            let x = rng::normal_vec(&mut r, self.n());
            self.apply_into(&x, &mut y);
            x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() > 0.0
        })
    }

    /// The same operator with a different `γ`.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(Self {
            gamma,
            ..self.clone()
        })
    }
}

impl LinearOperator for LowRankUpdatedOperator {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let k = self.k();
        let mut t = vec![0.0; k];
        match &self.scaling {
            None => {
                self.u.mul_transpose_into(x, &mut t);
                self.a.mul_into(x, y);
                let mut ut = vec![0.0; self.n()];
                self.u.mul_into(&t, &mut ut);
                for (yi, v) in y.iter_mut().zip(&ut) {
                    *yi += self.gamma * v;
                }
            }
            Some(s) => {
                let xs: Vec<f64> = x.iter().zip(s).map(|(a, b)| a / b).collect();
                self.u.mul_transpose_into(&xs, &mut t);
                self.a.mul_into(&xs, y);
                let mut ut = vec![0.0; self.n()];
                self.u.mul_into(&t, &mut ut);
                for ((yi, v), si) in y.iter_mut().zip(&ut).zip(s) {
                    *yi = (*yi + self.gamma * v) / si;
                }
            }
        }
    }
}
