//! Dense spectral tools: symmetric and general eigenvalue solvers, spectra of
//! preconditioned matrices and iteration matrices, and the eigenvalue bounds
//! they are checked against.

mod bounds;
mod hqr;
mod jacobi;

pub use bounds::{
    alpha_heuristic, bound_mu, bound_re_lower, bound_symm_interval, eig_kernel_at, eig_kernel_u,
    rayleigh_lambda, rho_fn, rho_upper_and_alpha_star, UNIT_TOL,
};
pub use hqr::{eig_general, GENERAL_EIG_CAP};
pub use jacobi::{eig_symmetric, SYMMETRY_TOL};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{DenseCholesky, DenseLu};
use crate::krylov::StationaryIteration;
use crate::operator::{LinearOperator, LowRankUpdatedOperator, DEFAULT_DENSE_CAP};
use crate::precond::{build_product, Mode, Preconditioner, SymmetrizedPreconditioner};
use crate::sparse::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Eigenvalues sorted by real part, then imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<Eigenvalue>,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<Eigenvalue>) -> Self {
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Self { eigenvalues }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(
            values
                .iter()
                .map(|&re| Eigenvalue { re, im: 0.0 })
                .collect(),
        )
    }

    pub fn eigenvalues(&self) -> &[Eigenvalue] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Every eigenvalue multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Spectrum {
        Spectrum::new(
            self.eigenvalues
                .iter()
                .map(|e| Eigenvalue {
                    re: c * e.re,
                    im: c * e.im,
                })
                .collect(),
        )
    }

    pub fn min_re(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|e| e.re)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_re(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|e| e.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs_im(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|e| e.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(Eigenvalue::abs)
            .fold(0.0, f64::max)
    }

    /// Real parts of the eigenvalues whose imaginary part is at most `tol`.
    pub fn real_values(&self, tol: f64) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .filter(|e| e.im.abs() <= tol)
            .map(|e| e.re)
            .collect()
    }

    /// Distance from `z` to the nearest eigenvalue.
    pub fn distance_to(&self, re: f64, im: f64) -> f64 {
        self.eigenvalues
            .iter()
            .map(|e| (e.re - re).hypot(e.im - im))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether every non-real eigenvalue has its conjugate within `tol`.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        self.eigenvalues
            .iter()
            .all(|e| e.im == 0.0 || self.distance_to(e.re, -e.im) <= tol)
    }

    /// CSV with header `re,im` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "re,im")?;
        for e in &self.eigenvalues {
            writeln!(w, "{:.16e},{:.16e}", e.re, e.im)?;
        }
        Ok(())
    }
}

/// Which scalar multiple of the preconditioner a spectrum refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// The map actually applied, without the `1/(2α)` factor.
    AsApplied,
    /// The conventional form the bounds are stated for.
    Conventional,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::SizeCap { n, cap })
    } else {
        Ok(())
    }
}

/// Dense `P⁻¹A`, assembled column by column from `P⁻¹(Aeⱼ)`.
pub fn preconditioned_matrix<O, P>(op: &O, p: &P) -> Result<DenseMatrix>
where
    O: LinearOperator + ?Sized,
    P: Preconditioner + ?Sized,
{
    let n = op.dim();
    check_cap(n, GENERAL_EIG_CAP)?;
    crate::error::check_dim("preconditioner size", n, p.dim())?;
    let mut m = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut ae = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply_into(&e, &mut ae);
        p.apply_into(&ae, &mut col);
        m.set_column(j, &col);
        e[j] = 0.0;
    }
    Ok(m)
}

/// Spectrum of `P⁻¹A` through the general eigensolver.
pub fn preconditioned_spectrum<O, P>(op: &O, p: &P, scaling: Scaling) -> Result<Spectrum>
where
    O: LinearOperator + ?Sized,
    P: Preconditioner + ?Sized,
{
    let s = eig_general(&preconditioned_matrix(op, p)?)?;
    Ok(match scaling {
        Scaling::AsApplied => s,
        Scaling::Conventional => s.scaled(p.inverse_scale()),
    })
}

/// Spectrum of `(P^S)⁻¹A_γ` for the symmetrized preconditioner, computed on the
/// symmetric form `R⁻¹(L⁻¹A_γL⁻ᵀ)R⁻ᵀ` with `RRᵀ = αI + γUUᵀ`.
pub fn symmetrized_spectrum(
    op: &LowRankUpdatedOperator,
    p: &SymmetrizedPreconditioner,
    scaling: Scaling,
) -> Result<Vec<f64>> {
    let n = op.n();
    check_cap(n, GENERAL_EIG_CAP)?;
    // C = L⁻¹ A_γ L⁻ᵀ, built one column at a time.
    let mut c = DenseMatrix::zeros(n, n);
    let mut ae = vec![0.0; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        p.solve_lt_in_place(&mut e);
        op.apply_into(&e, &mut ae);
        p.solve_l_in_place(&mut ae);
        c.set_column(j, &ae);
    }
    let smw = p.smw();
    let u = smw.u().to_dense();
    let f2 = DenseMatrix::from_fn(n, n, |i, j| {
        let mut s = 0.0;
        for k in 0..u.ncols() {
            s += u[(i, k)] * u[(j, k)];
        }
        smw.gamma() * s + if i == j { smw.alpha() } else { 0.0 }
    });
    let r = DenseCholesky::factor(&f2)?;
    // R⁻¹ C R⁻ᵀ: solve on columns, transpose, solve again.
    let mut t = c.symmetric_sum().scale(0.5);
    for j in 0..n {
        r.solve_lower_in_place(t.column_mut(j));
    }
    let mut t = t.transpose();
    for j in 0..n {
        r.solve_lower_in_place(t.column_mut(j));
    }
    let mut eig = eig_symmetric(&t.symmetric_sum().scale(0.5))?;
    if scaling == Scaling::Conventional {
        eig.iter_mut().for_each(|v| *v *= p.inverse_scale());
    }
    Ok(eig)
}

/// Dense iteration matrix `T_α` of the alternating iteration.
pub fn iteration_matrix(op: &LowRankUpdatedOperator, alpha: f64) -> Result<DenseMatrix> {
    let n = op.n();
    check_cap(n, GENERAL_EIG_CAP)?;
    let it = StationaryIteration::new(op, alpha)?;
    let zero = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut t = DenseMatrix::zeros(n, n);
    for j in 0..n {
        e[j] = 1.0;
        t.set_column(j, &it.step(&e, &zero));
        e[j] = 0.0;
    }
    Ok(t)
}

/// `ρ(T_α)`.
pub fn iteration_matrix_radius(op: &LowRankUpdatedOperator, alpha: f64) -> Result<f64> {
    Ok(eig_general(&iteration_matrix(op, alpha)?)?.spectral_radius())
}

/// Unit eigenvector for a real eigenvalue `lambda` of `m`, by inverse iteration.
pub fn real_eigenvector(m: &DenseMatrix, lambda: f64) -> Result<Vec<f64>> {
    let n = m.nrows();
    let mut delta = 1e-10 * lambda.abs().max(1.0);
    let lu = loop {
        let shifted = m.add_diagonal(-(lambda + delta));
        match DenseLu::factor(&shifted) {
            Ok(lu) => break lu,
            Err(Error::ZeroPivot { .. }) if delta < 1e-4 => delta *= 10.0,
            Err(e) => return Err(e),
        }
    };
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * (i as f64).sin()).collect();
    for _ in 0..6 {
        lu.solve_in_place(&mut v);
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(nv > 0.0) || !nv.is_finite() {
            return Err(Error::Breakdown("inverse iteration failed".into()));
        }
        v.iter_mut().for_each(|x| *x /= nv);
    }
    Ok(v)
}

/// `λ_min(A + Aᵀ)` for the operator's effective `A`.
pub fn lambda_min_sym(op: &LowRankUpdatedOperator) -> Result<f64> {
    check_cap(op.n(), DEFAULT_DENSE_CAP)?;
    Ok(eig_symmetric(&op.effective_a().to_dense().symmetric_sum())?[0])
}

/// Everything known about the spectrum of the preconditioned matrix at one α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub alpha: f64,
    pub gamma: f64,
    pub lambda_min_sym: f64,
    /// Lower bound on the real eigenvalues; absent unless `A + Aᵀ` is PD.
    pub mu: Option<f64>,
    /// The following need a symmetric positive definite `A`.
    pub lambda_min_a: Option<f64>,
    pub lambda_max_a: Option<f64>,
    pub lower_bound_re: Option<f64>,
    pub symm_interval: Option<(f64, f64)>,
    /// `max|α−λᵢ|/(α+λᵢ)` at this α.
    pub rho_upper: Option<f64>,
    pub alpha_star: Option<f64>,
    pub rho_at_alpha_star: Option<f64>,
    pub alpha_heuristic: f64,
    /// From the computed spectrum of the exact product preconditioner,
    /// when `n` is within the spectrum cap.
    pub min_re: Option<f64>,
    pub max_re: Option<f64>,
    pub max_abs_im: Option<f64>,
    /// Real eigenvalues found below `mu` (should be zero).
    pub mu_violations: Option<usize>,
}

/// Evaluates every bound for `op` at `alpha`. The spectrum columns are filled
/// only when `op.n() <= spectrum_cap`.
pub fn bounds_report(
    op: &LowRankUpdatedOperator,
    alpha: f64,
    spectrum_cap: usize,
) -> Result<BoundsReport> {
    let gamma = op.gamma();
    check_cap(op.n(), DEFAULT_DENSE_CAP)?;
    let sym_eigs = eig_symmetric(&op.effective_a().to_dense().symmetric_sum())?;
    let lambda_min_sym = sym_eigs[0];
    let mu = if lambda_min_sym > 0.0 {
        Some(bound_mu(alpha, gamma, lambda_min_sym)?)
    } else {
        None
    };
    let mut report = BoundsReport {
        alpha,
        gamma,
        lambda_min_sym,
        mu,
        lambda_min_a: None,
        lambda_max_a: None,
        lower_bound_re: None,
        symm_interval: None,
        rho_upper: None,
        alpha_star: None,
        rho_at_alpha_star: None,
        alpha_heuristic: alpha_heuristic(gamma)?,
        min_re: None,
        max_re: None,
        max_abs_im: None,
        mu_violations: None,
    };
    if op.is_symmetric() && lambda_min_sym > 0.0 {
        let eigs_a: Vec<f64> = sym_eigs.iter().map(|v| 0.5 * v).collect();
        let lmin = eigs_a[0];
        report.lambda_min_a = Some(lmin);
        report.lambda_max_a = eigs_a.last().copied();
        report.lower_bound_re = Some(bound_re_lower(alpha, gamma, lmin)?);
        report.symm_interval = Some(bound_symm_interval(alpha, gamma, lmin)?);
        report.rho_upper = Some(rho_fn(&eigs_a, alpha)?);
        let (rho, star) = rho_upper_and_alpha_star(&eigs_a)?;
        report.alpha_star = Some(star);
        report.rho_at_alpha_star = Some(rho);
    }
    if op.n() <= spectrum_cap {
        let p = build_product(op, alpha, Mode::Exact)?;
        let s = preconditioned_spectrum(op, &p, Scaling::Conventional)?;
        report.min_re = Some(s.min_re());
        report.max_re = Some(s.max_re());
        report.max_abs_im = Some(s.max_abs_im());
        report.mu_violations = mu.map(|m| s.real_values(0.0).iter().filter(|&&v| v < m).count());
    }
    Ok(report)
}
