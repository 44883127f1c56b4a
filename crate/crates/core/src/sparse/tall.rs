use crate::error::{check_dim, Result};
use crate::sparse::{CsrMatrix, DenseMatrix};

/// The n×k factor `U` of a low-rank update, stored sparse or dense.
#[derive(Debug, Clone, PartialEq)]
pub enum TallMatrix {
    Sparse(CsrMatrix),
    Dense(DenseMatrix),
}

/// `UᵀU`, kept in the representation that suits the factor.
#[derive(Debug, Clone, PartialEq)]
pub enum Gram {
    Sparse(CsrMatrix),
    Dense(DenseMatrix),
}

impl TallMatrix {
    pub fn nrows(&self) -> usize {
        match self {
            TallMatrix::Sparse(m) => m.nrows(),
            TallMatrix::Dense(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            TallMatrix::Sparse(m) => m.ncols(),
            TallMatrix::Dense(m) => m.ncols(),
        }
    }

    /// Returns `Ux`, or `Uᵀx` when `transpose` is set.
    pub fn apply(&self, x: &[f64], transpose: bool) -> Result<Vec<f64>> {
        match self {
            TallMatrix::Sparse(m) => m.spmv(x, transpose),
            TallMatrix::Dense(m) => m.matvec(x, transpose),
        }
    }

    pub(crate) fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        match self {
            TallMatrix::Sparse(m) => m.mul_into(x, y),
            TallMatrix::Dense(m) => m.mul_into(x, y),
        }
    }

    pub(crate) fn mul_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        match self {
            TallMatrix::Sparse(m) => m.mul_transpose_into(x, y),
            TallMatrix::Dense(m) => m.mul_transpose_into(x, y),
        }
    }

    /// Squared 2-norm of every row `uᵢᵀ`.
    pub fn row_norms_sq(&self) -> Vec<f64> {
        match self {
            TallMatrix::Sparse(m) => m.row_norms_sq(),
            TallMatrix::Dense(m) => m.row_norms_sq(),
        }
    }

    pub fn gram(&self) -> Gram {
        match self {
            TallMatrix::Sparse(m) => {
                let t = m.transpose();
                Gram::Sparse(t.matmul(m).expect("Uᵀ·U dimensions agree"))
            }
            TallMatrix::Dense(m) => Gram::Dense(m.gram()),
        }
    }

    pub fn scale(&self, s: f64) -> TallMatrix {
        match self {
            TallMatrix::Sparse(m) => TallMatrix::Sparse(m.scale(s)),
            TallMatrix::Dense(m) => TallMatrix::Dense(m.scale(s)),
        }
    }

    /// `diag(d) · U`.
    pub fn scale_rows(&self, d: &[f64]) -> Result<TallMatrix> {
        check_dim("scale_rows", self.nrows(), d.len())?;
        Ok(match self {
            TallMatrix::Sparse(m) => TallMatrix::Sparse(m.scale_rows_cols(Some(d), None)),
            TallMatrix::Dense(m) => TallMatrix::Dense(m.scale_rows_cols(Some(d), None)),
        })
    }

    /// `U · diag(d)`.
    pub fn scale_cols(&self, d: &[f64]) -> Result<TallMatrix> {
        check_dim("scale_cols", self.ncols(), d.len())?;
        Ok(match self {
            TallMatrix::Sparse(m) => TallMatrix::Sparse(m.scale_rows_cols(None, Some(d))),
            TallMatrix::Dense(m) => TallMatrix::Dense(m.scale_rows_cols(None, Some(d))),
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            TallMatrix::Sparse(m) => m.to_dense(),
            TallMatrix::Dense(m) => m.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TallMatrix::Sparse(m) => m.values().iter().all(|&v| v == 0.0),
            TallMatrix::Dense(m) => m.values().iter().all(|&v| v == 0.0),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            TallMatrix::Sparse(m) => m.is_finite(),
            TallMatrix::Dense(m) => m.is_finite(),
        }
    }
}

impl Gram {
    pub fn dim(&self) -> usize {
        match self {
            Gram::Sparse(m) => m.nrows(),
            Gram::Dense(m) => m.nrows(),
        }
    }
}

impl From<CsrMatrix> for TallMatrix {
    fn from(m: CsrMatrix) -> Self {
        TallMatrix::Sparse(m)
    }
}

impl From<DenseMatrix> for TallMatrix {
    fn from(m: DenseMatrix) -> Self {
        TallMatrix::Dense(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_unit_column_transpose() {
        let u = TallMatrix::Dense(DenseMatrix::from_columns(&[vec![1.0, 0.0]]).unwrap());
        assert_eq!(u.apply(&[5.0, 7.0], true).unwrap(), vec![5.0]);
    }

    #[test]
    fn sparse_zero_pattern_gives_zero() {
        let u = TallMatrix::Sparse(CsrMatrix::zeros(4, 2));
        assert_eq!(u.apply(&[1.0, 2.0], false).unwrap(), vec![0.0; 4]);
        assert_eq!(u.apply(&[1.0, 2.0, 3.0, 4.0], true).unwrap(), vec![0.0; 2]);
        assert!(u.is_zero());
    }

    #[test]
    fn sparse_and_dense_gram_agree() {
        let d = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![2.0, 3.0], vec![0.0, 4.0]]).unwrap();
        let s = TallMatrix::Sparse(CsrMatrix::from_dense(&d));
        let (Gram::Sparse(gs), Gram::Dense(gd)) = (s.gram(), TallMatrix::Dense(d).gram()) else {
            panic!("representation changed");
        };
        assert_eq!(gs.to_dense(), gd);
    }
}
