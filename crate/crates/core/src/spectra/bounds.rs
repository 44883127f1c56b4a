//! Closed-form eigenvalue bounds and formulas for the preconditioned matrix.
//!
//! All of them assume the problem was normalized to `‖A‖₂ = ‖U‖₂ = 1` and
//! refer to the preconditioner with its `1/(2α)` factor included.

use crate::error::{check_dim, Error, Result};
use crate::operator::LowRankUpdatedOperator;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

/// Lower bound `μ = αλ_min(A+Aᵀ) / ((1+α)(α+γ))` on the real eigenvalues.
pub fn bound_mu(alpha: f64, gamma: f64, lambda_min_sym: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    positive("gamma", gamma)?;
    positive("lambda_min(A+A^T)", lambda_min_sym)?;
    Ok(alpha * lambda_min_sym / ((1.0 + alpha) * (alpha + gamma)))
}

/// Lower bound on the real parts for SPD `A`:
/// `2α(α+1)(α+γ)λ_min(A) / ((α+1)²(α+γ)² + γ²)`.
pub fn bound_re_lower(alpha: f64, gamma: f64, lambda_min_a: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    positive("gamma", gamma)?;
    positive("lambda_min(A)", lambda_min_a)?;
    let s = (alpha + 1.0) * (alpha + gamma);
    Ok(2.0 * alpha * s * lambda_min_a / (s * s + gamma * gamma))
}

/// Interval `(2αλ_min(A)/((1+α)(α+γ)), (2+2γ)/(λ_min(A)+α))` holding the
/// spectrum of the symmetrized preconditioned matrix.
pub fn bound_symm_interval(alpha: f64, gamma: f64, lambda_min_a: f64) -> Result<(f64, f64)> {
    positive("alpha", alpha)?;
    positive("gamma", gamma)?;
    positive("lambda_min(A)", lambda_min_a)?;
    let lo = 2.0 * alpha * lambda_min_a / ((1.0 + alpha) * (alpha + gamma));
    let hi = (2.0 + 2.0 * gamma) / (lambda_min_a + alpha);
    Ok((lo, hi))
}

/// Eigenvalue `2η/(η+α)` belonging to an eigenvector `x ∈ Ker(Uᵀ)` with
/// `Ax = ηx`; it does not depend on γ.
pub fn eig_kernel_u(eta: f64, alpha: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    Ok(2.0 * eta / (eta + alpha))
}

/// Eigenvalue `2/(1 + α/(γ‖Uᵀx‖²))` belonging to an eigenvector
/// `x ∈ Ker(Aᵀ)`; it does not depend on A.
pub fn eig_kernel_at(utx_norm_sq: f64, alpha: f64, gamma: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    positive("gamma", gamma)?;
    if !(utx_norm_sq > 0.0) {
        return Err(Error::InvalidInput(
            "‖Uᵀx‖² must be positive for x in Ker(Aᵀ) (A_γ would be singular)".into(),
        ));
    }
    Ok(2.0 / (1.0 + alpha / (gamma * utx_norm_sq)))
}

/// Tolerance on `‖x‖₂ = 1` for [`rayleigh_lambda`].
pub const UNIT_TOL: f64 = 1e-12;

/// Evaluates
///
/// ```text
/// λ = 2α(xᵀAx + γ‖Uᵀx‖²) / (αxᵀAx + γxᵀAUUᵀx + α² + αγ‖Uᵀx‖²)
/// ```
///
/// for a real unit eigenvector `x` of the preconditioned matrix.
pub fn rayleigh_lambda(op: &LowRankUpdatedOperator, alpha: f64, x: &[f64]) -> Result<f64> {
    positive("alpha", alpha)?;
    check_dim("rayleigh vector", op.n(), x.len())?;
    let nx: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (nx - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidInput(format!(
            "x must have unit norm, got {nx}"
        )));
    }
    let a = op.effective_a();
    let u = op.effective_u();
    let gamma = op.gamma();
    let ax = a.spmv(x, false)?;
    let xax: f64 = x.iter().zip(&ax).map(|(p, q)| p * q).sum();
    let utx = u.apply(x, true)?;
    let s: f64 = utx.iter().map(|v| v * v).sum();
    // xᵀAUUᵀx = (Aᵀx)ᵀU(Uᵀx)
    let atx = a.spmv(x, true)?;
    let ut_atx = u.apply(&atx, true)?;
    let xauux: f64 = ut_atx.iter().zip(&utx).map(|(p, q)| p * q).sum();
    let num = 2.0 * alpha * (xax + gamma * s);
    let den = alpha * xax + gamma * xauux + alpha * alpha + alpha * gamma * s;
    Ok(num / den)
}

/// `max_i |α − λᵢ| / (α + λᵢ)`, the bound on `ρ(T_α)` for SPD `A`.
pub fn rho_fn(eigs_a: &[f64], alpha: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    check_spd_eigs(eigs_a)?;
    Ok(eigs_a
        .iter()
        .map(|l| (alpha - l).abs() / (alpha + l))
        .fold(0.0, f64::max))
}

fn check_spd_eigs(eigs_a: &[f64]) -> Result<()> {
    if eigs_a.is_empty() {
        return Err(Error::InvalidInput("no eigenvalues given".into()));
    }
    match eigs_a.iter().find(|l| !(**l > 0.0)) {
        Some(l) => Err(Error::InvalidInput(format!(
            "eigenvalues of A must be positive, found {l}"
        ))),
        None => Ok(()),
    }
}

/// `(rho_fn(α*), α*)` with `α* = √(λ₁λₙ)`, the minimizer of `rho_fn`.
pub fn rho_upper_and_alpha_star(eigs_a: &[f64]) -> Result<(f64, f64)> {
    check_spd_eigs(eigs_a)?;
    let lo = eigs_a.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigs_a.iter().copied().fold(0.0, f64::max);
    let alpha_star = (lo * hi).sqrt();
    Ok((rho_fn(eigs_a, alpha_star)?, alpha_star))
}

/// `α = √γ`, the maximizer of [`bound_mu`] in α.
pub fn alpha_heuristic(gamma: f64) -> Result<f64> {
    positive("gamma", gamma)?;
    Ok(gamma.sqrt())
}
