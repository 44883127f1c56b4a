//! Exact and incomplete factorizations plus triangular solves.

mod dense;
mod incomplete;
mod sparse_chol;
pub mod triangular;

pub use dense::{DenseCholesky, DenseLu, DENSE_SYMMETRY_TOL};
pub use incomplete::{ic0, ilu0, IncompleteFactor, IncompleteKind};
pub use sparse_chol::{elimination_tree, symbolic_cholesky_nnz, SparseCholesky};
pub use triangular::{solve_lower, solve_lower_transpose, solve_unit_lower, solve_upper};

/// Dimension up to which the k×k Woodbury matrix is factorized densely.
pub const DENSE_SMW_THRESHOLD: usize = 512;
