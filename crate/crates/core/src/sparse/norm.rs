//! 2-norm estimation by power iteration on the Gram operator `MᵀM`.

use crate::rng;
use crate::sparse::MatrixApply;

/// Default relative tolerance of the norm estimator.
pub const NORM_TOL: f64 = 1e-6;
/// Default iteration cap of the norm estimator.
pub const NORM_MAXIT: usize = 500;
const START_SEED: u64 = 0x5eed_2a0e;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Estimates `‖M‖₂`.
///
/// The estimate is the Rayleigh quotient `‖Mv‖` on the current unit iterate;
/// iteration stops once its relative change drops below `tol / 100`, which
/// keeps the true relative error under `tol` unless the two leading singular
/// values nearly coincide. Exceeding `maxit` returns the best estimate with
/// `converged = false`.
pub fn two_norm_estimate<M: MatrixApply + ?Sized>(m: &M, tol: f64, maxit: usize) -> NormEstimate {
    let (nr, nc) = (m.nrows(), m.ncols());
    if nr == 0 || nc == 0 {
        return NormEstimate {
            value: 0.0,
            converged: true,
            iterations: 0,
        };
    }
    let mut r = rng::seeded(START_SEED);
    let mut v: Vec<f64> = rng::normal_vec(&mut r, nc)
        .into_iter()
        .map(|x| x.abs() + 0.5)
        .collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut mv = vec![0.0; nr];
    let mut w = vec![0.0; nc];
    let mut estimate = 0.0;
    for it in 1..=maxit {
        m.apply_into(&v, &mut mv);
        let sigma = norm(&mv);
        m.apply_transpose_into(&mv, &mut w);
        let nw = norm(&w);
        if nw == 0.0 {
            return NormEstimate {
                value: sigma,
                converged: true,
                iterations: it,
            };
        }
        let change = (sigma - estimate).abs();
        estimate = sigma;
        if it > 1 && change <= 0.01 * tol * sigma {
            return NormEstimate {
                value: sigma,
                converged: true,
                iterations: it,
            };
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
    }
    NormEstimate {
        value: estimate,
        converged: false,
        iterations: maxit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{CsrMatrix, DenseMatrix, TallMatrix};

    #[test]
    fn diagonal_norm() {
        let d = CsrMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let e = two_norm_estimate(&d, NORM_TOL, NORM_MAXIT);
        assert!(e.converged);
        assert!((e.value - 3.0).abs() <= 1e-8, "{}", e.value);
    }

    #[test]
    fn unit_column() {
        let u = TallMatrix::Dense(DenseMatrix::from_columns(&[vec![1.0, 0.0, 0.0, 0.0]]).unwrap());
        let e = two_norm_estimate(&u, NORM_TOL, NORM_MAXIT);
        assert!((e.value - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn reports_nonconvergence() {
        let d = CsrMatrix::from_diagonal(&[1.0, 0.999, 0.998]);
        let e = two_norm_estimate(&d, 1e-14, 2);
        assert!(!e.converged);
        assert_eq!(e.iterations, 2);
        assert!(e.value > 0.99 && e.value <= 1.0 + 1e-12);
    }
}
