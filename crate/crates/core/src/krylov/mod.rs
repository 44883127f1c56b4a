//! Restarted GMRES with right preconditioning, preconditioned CG and the
//! alternating stationary iteration.
//!
//! Convergence is always decided on the true relative residual
//! `‖b − Ax‖₂ / ‖b‖₂` of the system handed to the solver.

mod cg;
mod gmres;
mod stationary;

pub use cg::pcg;
pub use gmres::gmres_right;
pub use stationary::{stationary_alternating, StationaryIteration};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Relative residual target.
    pub tol: f64,
    pub maxit: usize,
    /// GMRES cycle length.
    pub restart: usize,
    /// Initial guess; zero when `None`.
    pub x0: Option<Vec<f64>>,
    /// Damping of the stationary iteration, in (0, 1].
    pub beta: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            maxit: 2000,
            restart: 20,
            x0: None,
            beta: 1.0,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.restart == 0 {
            return Err(Error::InvalidInput("restart must be at least 1".into()));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "beta must lie in (0, 1], got {}",
                self.beta
            )));
        }
        if let Some(x0) = &self.x0 {
            crate::error::check_dim("initial guess", n, x0.len())?;
        }
        Ok(())
    }

    fn initial_guess(&self, n: usize) -> Vec<f64> {
        self.x0.clone().unwrap_or_else(|| vec![0.0; n])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    /// Total inner iterations (every Arnoldi step for GMRES).
    pub iterations: usize,
    /// Relative residual after each iteration. Inside a GMRES cycle this is
    /// the Givens estimate; cycle ends hold the recomputed true residual.
    pub residual_history: Vec<f64>,
    /// Final true relative residual.
    pub relres: f64,
    /// Preconditioner construction time, filled in by the caller.
    pub setup_seconds: f64,
    pub solve_seconds: f64,
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// `r = b − Ax`.
pub(crate) fn residual<O: crate::operator::LinearOperator + ?Sized>(
    op: &O,
    b: &[f64],
    x: &[f64],
    r: &mut [f64],
) {
    op.apply_into(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

pub(crate) fn ensure_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Breakdown(format!("non-finite values in {what}")))
    }
}
