//! Up-looking sparse Cholesky with elimination-tree symbolic analysis.

use crate::error::{check_dim, Error, Result};
use crate::sparse::CsrMatrix;

const NONE: usize = usize::MAX;

/// Elimination tree of a symmetric matrix given through its lower triangle
/// (row `k` lists the columns `j < k`). Roots have parent `usize::MAX`.
pub fn elimination_tree(m: &CsrMatrix) -> Vec<usize> {
    let n = m.nrows();
    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for k in 0..n {
        for &j in m.row(k).0 {
            if j >= k {
                break;
            }
            let mut i = j;
            while i != NONE && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == NONE {
                    parent[i] = k;
                }
                i = next;
            }
        }
    }
    parent
}

/// Pattern of row `k` of L (excluding the diagonal) in topological order,
/// written to `stack[top..]`; returns `top`.
fn ereach(
    m: &CsrMatrix,
    k: usize,
    parent: &[usize],
    stack: &mut [usize],
    flag: &mut [usize],
) -> usize {
    let n = m.nrows();
    let mut top = n;
    flag[k] = k;
    for &j in m.row(k).0 {
        if j >= k {
            break;
        }
        let mut len = 0;
        let mut i = j;
        while flag[i] != k {
            stack[len] = i;
            len += 1;
            flag[i] = k;
            i = parent[i];
        }
        while len > 0 {
            top -= 1;
            len -= 1;
            stack[top] = stack[len];
        }
    }
    top
}

/// Column counts of L (diagonal included) for the matrix whose lower pattern is `m`.
fn column_counts(m: &CsrMatrix, parent: &[usize]) -> Vec<usize> {
    let n = m.nrows();
    let mut counts = vec![1usize; n];
    let mut stack = vec![0usize; n];
    let mut flag = vec![NONE; n];
    for k in 0..n {
        let top = ereach(m, k, parent, &mut stack, &mut flag);
        for &i in &stack[top..n] {
            counts[i] += 1;
        }
    }
    counts
}

/// Number of stored entries of the Cholesky factor of `P M Pᵀ` (diagonal
/// included), from the symbolic analysis alone.
pub fn symbolic_cholesky_nnz(pattern: &CsrMatrix, perm: &[usize]) -> Result<usize> {
    let c = pattern.symmetric_pattern()?.permute_symmetric(perm)?;
    let parent = elimination_tree(&c);
    Ok(column_counts(&c, &parent).iter().sum())
}

/// `P M Pᵀ = LLᵀ` for a sparse SPD matrix.
#[derive(Debug, Clone)]
pub struct SparseCholesky {
    perm: Vec<usize>,
    lower: CsrMatrix,
}

impl SparseCholesky {
    /// Factorizes `P M Pᵀ` where row `i` of the permuted matrix is row
    /// `perm[i]` of `M`. Only the lower triangle of the permuted matrix is read.
    pub fn factor(m: &CsrMatrix, perm: &[usize]) -> Result<Self> {
        check_dim("sparse Cholesky", m.nrows(), m.ncols())?;
        let n = m.nrows();
        check_dim("sparse Cholesky permutation", n, perm.len())?;
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidInput("ordering is not a permutation".into()));
            }
            seen[p] = true;
        }
        let c = m.permute_symmetric(perm)?.lower_triangle();
        let parent = elimination_tree(&c);
        let counts = column_counts(&c, &parent);

        // Column-compressed L; the diagonal is the first entry of each column.
        let mut colptr = vec![0usize; n + 1];
        for j in 0..n {
            colptr[j + 1] = colptr[j] + counts[j];
        }
        let nnz = colptr[n];
        let mut rows = vec![0usize; nnz];
        let mut vals = vec![0.0; nnz];
        let mut next: Vec<usize> = colptr[..n].to_vec();

        let mut x = vec![0.0; n];
        let mut stack = vec![0usize; n];
        let mut flag = vec![NONE; n];
        for k in 0..n {
            let top = ereach(&c, k, &parent, &mut stack, &mut flag);
            let (cols, cvals) = c.row(k);
            for (&j, &v) in cols.iter().zip(cvals) {
                x[j] = v;
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &i in &stack[top..n] {
                let lki = x[i] / vals[colptr[i]];
                x[i] = 0.0;
                for p in colptr[i] + 1..next[i] {
                    x[rows[p]] -= vals[p] * lki;
                }
                d -= lki * lki;
                let p = next[i];
                rows[p] = k;
                vals[p] = lki;
                next[i] += 1;
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { index: k, pivot: d });
            }
            let p = next[k];
            rows[p] = k;
            vals[p] = d.sqrt();
            next[k] += 1;
        }

        // The column-compressed L is the row-compressed Lᵀ.
        let upper = CsrMatrix::from_parts_unchecked(n, n, colptr, rows, vals);
        Ok(Self {
            perm: perm.to_vec(),
            lower: upper.transpose(),
        })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Lower-triangular factor of the permuted matrix.
    pub fn l(&self) -> &CsrMatrix {
        &self.lower
    }

    pub fn nnz_l(&self) -> usize {
        self.lower.nnz()
    }

    /// Solves `Mx = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_dim("sparse Cholesky solve", self.dim(), b.len())?;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        self.solve_permuted_in_place(&mut y);
        let mut x = vec![0.0; b.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        Ok(x)
    }

    /// Solves `LLᵀy = c` in the permuted ordering.
    fn solve_permuted_in_place(&self, y: &mut [f64]) {
        self.forward_in_place(y);
        self.backward_in_place(y);
    }

    /// `y ← L⁻¹ y` (permuted ordering).
    pub fn forward_in_place(&self, y: &mut [f64]) {
        let l = &self.lower;
        for i in 0..l.nrows() {
            let (cols, vals) = l.row(i);
            let last = cols.len() - 1;
            let mut acc = y[i];
            for p in 0..last {
                acc -= vals[p] * y[cols[p]];
            }
            y[i] = acc / vals[last];
        }
    }

    /// `y ← L⁻ᵀ y` (permuted ordering).
    pub fn backward_in_place(&self, y: &mut [f64]) {
        let l = &self.lower;
        for i in (0..l.nrows()).rev() {
            let (cols, vals) = l.row(i);
            let last = cols.len() - 1;
            let yi = y[i] / vals[last];
            y[i] = yi;
            for p in 0..last {
                y[cols[p]] -= vals[p] * yi;
            }
        }
    }
}
