use std::ops::{Index, IndexMut};

use crate::error::{check_dim, Error, Result};

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(nrows: usize, ncols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != nrows * ncols {
            return Err(Error::InvalidInput(format!(
                "dense {nrows}x{ncols} matrix needs {} values, got {}",
                nrows * ncols,
                values.len()
            )));
        }
        Ok(Self {
            nrows,
            ncols,
            values,
        })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            values: vec![0.0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from row-major nested rows (convenient for small literals).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Ok(Self::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, |c| c.len());
        if cols.iter().any(|c| c.len() != nrows) {
            return Err(Error::InvalidInput("columns differ in length".into()));
        }
        Ok(Self {
            nrows,
            ncols,
            values: cols.concat(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Column-major storage.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.values[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn set_column(&mut self, j: usize, col: &[f64]) {
        self.column_mut(j).copy_from_slice(col);
    }

    /// Returns `Mx`, or `Mᵀx` when `transpose` is set.
    pub fn matvec(&self, x: &[f64], transpose: bool) -> Result<Vec<f64>> {
        if transpose {
            check_dim("dense matvec (transpose)", self.nrows, x.len())?;
            let mut y = vec![0.0; self.ncols];
            self.mul_transpose_into(x, &mut y);
            Ok(y)
        } else {
            check_dim("dense matvec", self.ncols, x.len())?;
            let mut y = vec![0.0; self.nrows];
            self.mul_into(x, &mut y);
            Ok(y)
        }
    }

    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate().take(self.ncols) {
            if xj == 0.0 {
                continue;
            }
            for (yi, &mij) in y.iter_mut().zip(self.column(j)) {
                *yi += mij * xj;
            }
        }
    }

    pub fn mul_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        for (j, yj) in y.iter_mut().enumerate().take(self.ncols) {
            *yj = self.column(j).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim("dense matmul", self.ncols, other.nrows)?;
        let mut out = DenseMatrix::zeros(self.nrows, other.ncols);
        for j in 0..other.ncols {
            let col = other.column(j).to_vec();
            self.mul_into(&col, out.column_mut(j));
        }
        Ok(out)
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    /// `MᵀM`.
    pub fn gram(&self) -> DenseMatrix {
        let k = self.ncols;
        let mut g = DenseMatrix::zeros(k, k);
        for j in 0..k {
            for i in 0..=j {
                let v: f64 = self
                    .column(i)
                    .iter()
                    .zip(self.column(j))
                    .map(|(a, b)| a * b)
                    .sum();
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim("dense add (rows)", self.nrows, other.nrows)?;
        check_dim("dense add (cols)", self.ncols, other.ncols)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(DenseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            values,
        })
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        DenseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add_diagonal(&self, s: f64) -> DenseMatrix {
        let mut out = self.clone();
        for i in 0..self.nrows.min(self.ncols) {
            out[(i, i)] += s;
        }
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Max |m_ij − m_ji| relative to the Frobenius norm.
    pub fn relative_asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        let fro = self.frobenius_norm();
        if fro == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for j in 0..self.ncols {
            for i in 0..j {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst / fro
    }

    /// `(M + Mᵀ)`.
    pub fn symmetric_sum(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.nrows, self.ncols, |i, j| self[(i, j)] + self[(j, i)])
    }

    /// Squared 2-norm of every row.
    pub fn row_norms_sq(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows];
        for j in 0..self.ncols {
            for (o, v) in out.iter_mut().zip(self.column(j)) {
                *o += v * v;
            }
        }
        out
    }

    /// `diag(left) · M · diag(right)`.
    pub fn scale_rows_cols(&self, left: Option<&[f64]>, right: Option<&[f64]>) -> DenseMatrix {
        DenseMatrix::from_fn(self.nrows, self.ncols, |i, j| {
            self[(i, j)] * left.map_or(1.0, |l| l[i]) * right.map_or(1.0, |r| r[j])
        })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &self.values[j * self.nrows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &mut self.values[j * self.nrows + i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_major_layout() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.values(), &[1.0, 3.0, 2.0, 4.0]);
        assert_eq!(m.matvec(&[1.0, 1.0], false).unwrap(), vec![3.0, 7.0]);
        assert_eq!(m.matvec(&[1.0, 1.0], true).unwrap(), vec![4.0, 6.0]);
    }

    #[test]
    fn gram_matches_product() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let g = m.gram();
        let p = m.transpose().matmul(&m).unwrap();
        assert_eq!(g, p);
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
    }
}
