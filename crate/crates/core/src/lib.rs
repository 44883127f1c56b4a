//! Solvers for linear systems `(A + γUUᵀ)x = b` with a sparse `A` and a
//! low-rank, possibly dense update `γUUᵀ`.
//!
//! The crate provides the alternating-splitting preconditioner
//! `(A + αI)(αI + γUUᵀ)` and its inexact, symmetrized and unshifted variants,
//! a Sherman–Morrison–Woodbury inner solver for `αI + γUUᵀ`, restarted GMRES,
//! PCG and the underlying stationary iteration, dense spectral tools for
//! checking eigenvalue bounds, and seeded test-problem generators.

pub mod error;
pub mod factor;
pub mod krylov;
pub mod operator;
pub mod precond;
pub mod problems;
pub mod rng;
pub mod sparse;
pub mod spectra;

pub use error::{Error, Result};
