//! Compressed sparse row storage.

use crate::error::{check_dim, Error, Result};
use crate::sparse::DenseMatrix;

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row, so every row is
/// duplicate-free and products are summed in ascending column order.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, validating every structural invariant.
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != nrows + 1 {
            return Err(Error::InvalidInput(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                nrows + 1
            )));
        }
        if row_offsets[0] != 0 {
            return Err(Error::InvalidInput("row_offsets[0] must be 0".into()));
        }
        if col_indices.len() != values.len() || row_offsets[nrows] != values.len() {
            return Err(Error::InvalidInput(
                "row_offsets[nrows], col_indices and values disagree on nnz".into(),
            ));
        }
        for i in 0..nrows {
            let (start, end) = (row_offsets[i], row_offsets[i + 1]);
            if start > end {
                return Err(Error::InvalidInput(format!(
                    "row_offsets decreases at row {i}"
                )));
            }
            let cols = &col_indices[start..end];
            for (p, &c) in cols.iter().enumerate() {
                if c >= ncols {
                    return Err(Error::InvalidInput(format!(
                        "column index {c} out of range in row {i}"
                    )));
                }
                if p > 0 && cols[p - 1] >= c {
                    return Err(Error::InvalidInput(format!(
                        "column indices not strictly increasing in row {i}"
                    )));
                }
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    // Caller guarantees sorted, duplicate-free rows.
    pub(crate) fn from_parts_unchecked(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_offsets.len(), nrows + 1);
        Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Builds a matrix from (row, col, value) triplets; repeated positions are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::InvalidInput(format!(
                    "triplet ({r}, {c}) outside a {nrows}x{ncols} matrix"
                )));
            }
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(r, c, v) in triplets {
            let p = next[r];
            cols[p] = c;
            vals[p] = v;
            next[r] += 1;
        }

        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        let mut order: Vec<usize> = Vec::new();
        for i in 0..nrows {
            let (start, end) = (counts[i], counts[i + 1]);
            order.clear();
            order.extend(start..end);
            order.sort_by_key(|&p| cols[p]);
            for &p in &order {
                match col_indices.last() {
                    Some(&last) if values.len() > row_offsets[i] && last == cols[p] => {
                        *values.last_mut().unwrap() += vals[p];
                    }
                    _ => {
                        col_indices.push(cols[p]);
                        values.push(vals[p]);
                    }
                }
            }
            row_offsets.push(values.len());
        }
        Ok(Self::from_parts_unchecked(
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        ))
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_parts_unchecked(nrows, ncols, vec![0; nrows + 1], Vec::new(), Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_parts_unchecked(n, n, (0..=n).collect(), (0..n).collect(), diag.to_vec())
    }

    /// Converts a dense matrix, keeping entries that are not exactly zero.
    pub fn from_dense(m: &DenseMatrix) -> Self {
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != 0.0 {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        Self::from_parts_unchecked(m.nrows(), m.ncols(), row_offsets, col_indices, values)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[s..e], &self.values[s..e])
    }

    /// Stored value at (i, j), or zero.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// Returns `Mx`, or `Mᵀx` when `transpose` is set.
    pub fn spmv(&self, x: &[f64], transpose: bool) -> Result<Vec<f64>> {
        if transpose {
            check_dim("spmv (transpose)", self.nrows, x.len())?;
            let mut y = vec![0.0; self.ncols];
            self.mul_transpose_into(x, &mut y);
            Ok(y)
        } else {
            check_dim("spmv", self.ncols, x.len())?;
            let mut y = vec![0.0; self.nrows];
            self.mul_into(x, &mut y);
            Ok(y)
        }
    }

    /// `y = Mx`; lengths must already match.
    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.nrows) {
            let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut acc = 0.0;
            for p in s..e {
                acc += self.values[p] * x[self.col_indices[p]];
            }
            *yi = acc;
        }
    }

    /// `y = Mᵀx`; lengths must already match.
    pub fn mul_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate().take(self.nrows) {
            if xi == 0.0 {
                continue;
            }
            let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
            for p in s..e {
                y[self.col_indices[p]] += self.values[p] * xi;
            }
        }
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; self.nnz()];
        let mut vals = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            let (ci, vi) = self.row(i);
            for (&c, &v) in ci.iter().zip(vi) {
                let p = next[c];
                cols[p] = i;
                vals[p] = v;
                next[c] += 1;
            }
        }
        CsrMatrix::from_parts_unchecked(self.ncols, self.nrows, counts, cols, vals)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                d[(i, c)] = v;
            }
        }
        d
    }

    /// Main diagonal (zeros where no entry is stored).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> CsrMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Returns `diag(left) · M · diag(right)`.
    pub fn scale_rows_cols(&self, left: Option<&[f64]>, right: Option<&[f64]>) -> CsrMatrix {
        let mut out = self.clone();
        for i in 0..self.nrows {
            let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let li = left.map_or(1.0, |l| l[i]);
            for p in s..e {
                let rj = right.map_or(1.0, |r| r[self.col_indices[p]]);
                out.values[p] *= li * rj;
            }
        }
        out
    }

    /// Returns `M + sI`, inserting diagonal entries that are not stored.
    pub fn add_diagonal(&self, s: f64) -> CsrMatrix {
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::with_capacity(self.nnz() + self.nrows);
        let mut values = Vec::with_capacity(self.nnz() + self.nrows);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut placed = i >= self.ncols;
            for (&c, &v) in cols.iter().zip(vals) {
                if !placed && c >= i {
                    if c == i {
                        col_indices.push(c);
                        values.push(v + s);
                        placed = true;
                        continue;
                    }
                    col_indices.push(i);
                    values.push(s);
                    placed = true;
                }
                col_indices.push(c);
                values.push(v);
            }
            if !placed {
                col_indices.push(i);
                values.push(s);
            }
            row_offsets.push(values.len());
        }
        CsrMatrix::from_parts_unchecked(self.nrows, self.ncols, row_offsets, col_indices, values)
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        check_dim("matmul", self.ncols, other.nrows)?;
        let m = other.ncols;
        let mut acc = vec![0.0; m];
        let mut mark = vec![usize::MAX; m];
        let mut pattern: Vec<usize> = Vec::new();
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.nrows {
            pattern.clear();
            let (ca, va) = self.row(i);
            for (&k, &a) in ca.iter().zip(va) {
                let (cb, vb) = other.row(k);
                for (&j, &b) in cb.iter().zip(vb) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        pattern.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            pattern.sort_unstable();
            for &j in &pattern {
                col_indices.push(j);
                values.push(acc[j]);
            }
            row_offsets.push(values.len());
        }
        Ok(CsrMatrix::from_parts_unchecked(
            self.nrows,
            m,
            row_offsets,
            col_indices,
            values,
        ))
    }

    /// `self + s·other` over the union pattern.
    pub fn add_scaled(&self, other: &CsrMatrix, s: f64) -> Result<CsrMatrix> {
        check_dim("add_scaled (rows)", self.nrows, other.nrows)?;
        check_dim("add_scaled (cols)", self.ncols, other.ncols)?;
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.nrows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let a = ca.get(p).copied().unwrap_or(usize::MAX);
                let b = cb.get(q).copied().unwrap_or(usize::MAX);
                if a < b {
                    col_indices.push(a);
                    values.push(va[p]);
                    p += 1;
                } else if b < a {
                    col_indices.push(b);
                    values.push(s * vb[q]);
                    q += 1;
                } else {
                    col_indices.push(a);
                    values.push(va[p] + s * vb[q]);
                    p += 1;
                    q += 1;
                }
            }
            row_offsets.push(values.len());
        }
        Ok(CsrMatrix::from_parts_unchecked(
            self.nrows,
            self.ncols,
            row_offsets,
            col_indices,
            values,
        ))
    }

    /// Max |m_ij − m_ji| relative to the Frobenius norm (0 for the zero matrix).
    pub fn relative_asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        let fro = self.frobenius_norm();
        if fro == 0.0 {
            return 0.0;
        }
        let t = self.transpose();
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            let (ca, va) = self.row(i);
            let (cb, vb) = t.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let a = ca.get(p).copied().unwrap_or(usize::MAX);
                let b = cb.get(q).copied().unwrap_or(usize::MAX);
                let d = if a < b {
                    p += 1;
                    va[p - 1]
                } else if b < a {
                    q += 1;
                    vb[q - 1]
                } else {
                    p += 1;
                    q += 1;
                    va[p - 1] - vb[q - 1]
                };
                worst = worst.max(d.abs());
            }
        }
        worst / fro
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        self.nrows == self.ncols && self.relative_asymmetry() <= rel_tol
    }

    /// Entries with column ≤ row.
    pub fn lower_triangle(&self) -> CsrMatrix {
        self.filter(|i, j| j <= i)
    }

    /// Entries with column ≥ row.
    pub fn upper_triangle(&self) -> CsrMatrix {
        self.filter(|i, j| j >= i)
    }

    fn filter(&self, keep: impl Fn(usize, usize) -> bool) -> CsrMatrix {
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                if keep(i, c) {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        CsrMatrix::from_parts_unchecked(self.nrows, self.ncols, row_offsets, col_indices, values)
    }

    /// Pattern of `M + Mᵀ` with unit values (square input).
    pub fn symmetric_pattern(&self) -> Result<CsrMatrix> {
        check_dim("symmetric_pattern", self.nrows, self.ncols)?;
        let ones = CsrMatrix::from_parts_unchecked(
            self.nrows,
            self.ncols,
            self.row_offsets.clone(),
            self.col_indices.clone(),
            vec![1.0; self.nnz()],
        );
        let sum = ones.add_scaled(&ones.transpose(), 1.0)?;
        Ok(CsrMatrix::from_parts_unchecked(
            sum.nrows,
            sum.ncols,
            sum.row_offsets,
            sum.col_indices,
            vec![1.0; sum.values.len()],
        ))
    }

    /// Symmetric permutation `P M Pᵀ`: entry (i, j) of the result is entry
    /// (perm[i], perm[j]) of `self`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Result<CsrMatrix> {
        check_dim("permute_symmetric (rows)", self.nrows, perm.len())?;
        check_dim("permute_symmetric (cols)", self.ncols, perm.len())?;
        let n = perm.len();
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for &old in perm {
            entries.clear();
            let (cols, vals) = self.row(old);
            entries.extend(cols.iter().zip(vals).map(|(&c, &v)| (inv[c], v)));
            entries.sort_unstable_by_key(|e| e.0);
            for &(c, v) in &entries {
                col_indices.push(c);
                values.push(v);
            }
            row_offsets.push(values.len());
        }
        Ok(CsrMatrix::from_parts_unchecked(
            n,
            n,
            row_offsets,
            col_indices,
            values,
        ))
    }

    /// Squared 2-norm of every row.
    pub fn row_norms_sq(&self) -> Vec<f64> {
        (0..self.nrows)
            .map(|i| self.row(i).1.iter().map(|v| v * v).sum())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_spmv() {
        let i3 = CsrMatrix::identity(3);
        assert_eq!(
            i3.spmv(&[1.0, 2.0, 3.0], false).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn small_spmv_and_transpose() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 1, 3.0)]).unwrap();
        assert_eq!(m.spmv(&[1.0, 1.0], false).unwrap(), vec![3.0, 3.0]);
        assert_eq!(m.spmv(&[1.0, 1.0], true).unwrap(), vec![1.0, 5.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let m = CsrMatrix::zeros(3, 2);
        assert!(matches!(
            m.spmv(&[1.0; 3], false),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(m.spmv(&[1.0; 3], true).is_ok());
    }

    #[test]
    fn rejects_bad_structure() {
        assert!(CsrMatrix::new(1, 3, vec![0, 2], vec![1, 1], vec![1.0, 2.0]).is_err());
        assert!(CsrMatrix::new(1, 3, vec![0, 1], vec![3], vec![1.0]).is_err());
        assert!(CsrMatrix::new(2, 2, vec![1, 1, 1], vec![0], vec![1.0]).is_err());
        assert!(CsrMatrix::new(2, 2, vec![0, 1, 2], vec![0, 1], vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, 2, &[(1, 0, 1.0), (0, 1, 2.0), (1, 0, 0.5)]).unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(1, 0), 1.5);
    }

    #[test]
    fn add_diagonal_inserts_missing_entries() {
        let m = CsrMatrix::from_triplets(3, 3, &[(0, 1, 2.0), (1, 1, 1.0), (2, 0, 4.0)]).unwrap();
        let s = m.add_diagonal(10.0);
        assert_eq!(s.diagonal(), vec![10.0, 11.0, 10.0]);
        assert_eq!(s.get(0, 1), 2.0);
        assert_eq!(s.get(2, 0), 4.0);
        assert_eq!(s.nnz(), 5);
    }

    #[test]
    fn permutation_moves_entries() {
        let m =
            CsrMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0), (0, 2, 5.0)])
                .unwrap();
        let p = m.permute_symmetric(&[2, 0, 1]).unwrap();
        assert_eq!(p.diagonal(), vec![3.0, 1.0, 2.0]);
        assert_eq!(p.get(1, 0), 5.0);
    }

    #[test]
    fn asymmetry_measure() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(m.relative_asymmetry(), 0.0);
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0)]).unwrap();
        assert!(m.relative_asymmetry() > 0.5);
    }
}
