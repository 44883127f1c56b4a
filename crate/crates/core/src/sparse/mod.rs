//! Sparse and dense storage, kernels, Matrix Market I/O, norm estimation and
//! fill-reducing ordering.

mod amd;
mod csr;
mod dense;
pub mod mm;
mod norm;
mod tall;

pub use amd::amd_ordering;
pub use csr::CsrMatrix;
pub use dense::DenseMatrix;
pub use mm::{mm_read, mm_write, read_vector, write_vector, MmMatrix};
pub use norm::{two_norm_estimate, NormEstimate, NORM_MAXIT, NORM_TOL};
pub use tall::{Gram, TallMatrix};

/// A rectangular matrix that can apply itself and its transpose.
pub trait MatrixApply {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y = Mx`.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);
    /// `y = Mᵀx`.
    fn apply_transpose_into(&self, x: &[f64], y: &mut [f64]);
}

impl MatrixApply for CsrMatrix {
    fn nrows(&self) -> usize {
        CsrMatrix::nrows(self)
    }
    fn ncols(&self) -> usize {
        CsrMatrix::ncols(self)
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.mul_into(x, y)
    }
    fn apply_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        self.mul_transpose_into(x, y)
    }
}

impl MatrixApply for DenseMatrix {
    fn nrows(&self) -> usize {
        DenseMatrix::nrows(self)
    }
    fn ncols(&self) -> usize {
        DenseMatrix::ncols(self)
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.mul_into(x, y)
    }
    fn apply_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        self.mul_transpose_into(x, y)
    }
}

impl MatrixApply for TallMatrix {
    fn nrows(&self) -> usize {
        TallMatrix::nrows(self)
    }
    fn ncols(&self) -> usize {
        TallMatrix::ncols(self)
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.mul_into(x, y)
    }
    fn apply_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        self.mul_transpose_into(x, y)
    }
}
