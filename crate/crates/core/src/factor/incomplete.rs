//! No-fill incomplete factorizations: IC(0) and ILU(0).

use crate::error::{check_dim, Error, Result};
use crate::factor::triangular;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncompleteKind {
    Ic0,
    Ilu0,
}

/// An incomplete factorization restricted to the pattern of its input.
///
/// For IC(0), `l` is the lower factor and the upper factor is `lᵀ`. For
/// ILU(0), `l` is unit lower-triangular (diagonal stored) and `ut` holds the
/// upper factor including its diagonal.
#[derive(Debug, Clone)]
pub struct IncompleteFactor {
    kind: IncompleteKind,
    l: CsrMatrix,
    ut: Option<CsrMatrix>,
    shift_used: f64,
}

impl IncompleteFactor {
    pub fn kind(&self) -> IncompleteKind {
        self.kind
    }

    pub fn l(&self) -> &CsrMatrix {
        &self.l
    }

    /// Upper factor for ILU(0); `None` for IC(0), whose upper factor is `lᵀ`.
    pub fn ut(&self) -> Option<&CsrMatrix> {
        self.ut.as_ref()
    }

    /// Diagonal shift that made the factorization succeed (IC(0) only).
    pub fn shift_used(&self) -> f64 {
        self.shift_used
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Applies the inverse of the incomplete factorization.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_dim("incomplete factor solve", self.dim(), b.len())?;
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    /// `x ← (LU)⁻¹x`. Pivots were checked nonzero when the factor was built.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        match &self.ut {
            None => {
                triangular::lower_in_place(&self.l, x, false).expect("IC(0) pivots are positive");
                triangular::lower_transpose_in_place(&self.l, x)
                    .expect("IC(0) pivots are positive");
            }
            Some(u) => {
                triangular::lower_in_place(&self.l, x, true).expect("unit diagonal");
                triangular::upper_in_place(u, x).expect("ILU(0) pivots are nonzero");
            }
        }
    }

    /// `x ← L⁻¹x` (unit diagonal for ILU(0)).
    pub fn solve_l_in_place(&self, x: &mut [f64]) {
        let unit = self.kind == IncompleteKind::Ilu0;
        triangular::lower_in_place(&self.l, x, unit).expect("validated factor");
    }

    /// `x ← L⁻ᵀx` (IC(0) only).
    pub fn solve_lt_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(self.kind, IncompleteKind::Ic0);
        triangular::lower_transpose_in_place(&self.l, x).expect("validated factor");
    }
}

/// Breakdown shift as a multiple of max |diag| on the first retry.
const INITIAL_SHIFT_FACTOR: f64 = 1e-3;

/// IC(0) on the lower pattern of symmetric `m`.
///
/// On a nonpositive pivot the factorization restarts on `m + sI`, with `s`
/// starting at `1e-3 · max|diag|` and growing tenfold per retry.
pub fn ic0(m: &CsrMatrix, max_shift_retries: usize) -> Result<IncompleteFactor> {
    check_dim("ic0", m.nrows(), m.ncols())?;
    let lower = m.lower_triangle();
    let max_diag = m.diagonal().iter().fold(0.0f64, |a, d| a.max(d.abs()));
    let mut shift = 0.0;
    let mut retries = 0;
    loop {
        let shifted = if shift > 0.0 {
            lower.add_diagonal(shift)
        } else {
            lower.clone()
        };
        match ic0_attempt(&shifted) {
            Ok(l) => {
                return Ok(IncompleteFactor {
                    kind: IncompleteKind::Ic0,
                    l,
                    ut: None,
                    shift_used: shift,
                })
            }
            Err(e) => {
                if retries == max_shift_retries || max_diag == 0.0 {
                    return Err(e);
                }
                retries += 1;
                shift = if shift == 0.0 {
                    INITIAL_SHIFT_FACTOR * max_diag
                } else {
                    shift * 10.0
                };
            }
        }
    }
}

fn ic0_attempt(lower: &CsrMatrix) -> Result<CsrMatrix> {
    let n = lower.nrows();
    let offsets = lower.row_offsets().to_vec();
    let cols = lower.col_indices().to_vec();
    let mut vals = lower.values().to_vec();
    for i in 0..n {
        let (s, e) = (offsets[i], offsets[i + 1]);
        if e == s || cols[e - 1] != i {
            return Err(Error::NotPositiveDefinite {
                index: i,
                pivot: 0.0,
            });
        }
        for p in s..e {
            let j = cols[p];
            // Σ_{k<j} L_ik L_jk over the shared pattern.
            let (js, je) = (offsets[j], offsets[j + 1]);
            let (mut a, mut b) = (s, js);
            let mut dot = 0.0;
            while a < p && b < je {
                let (ca, cb) = (cols[a], cols[b]);
                if cb >= j {
                    break;
                }
                if ca == cb {
                    dot += vals[a] * vals[b];
                    a += 1;
                    b += 1;
                } else if ca < cb {
                    a += 1;
                } else {
                    b += 1;
                }
            }
            let v = vals[p] - dot;
            if j < i {
                vals[p] = v / vals[je - 1];
            } else {
                if !(v > 0.0) {
                    return Err(Error::NotPositiveDefinite { index: i, pivot: v });
                }
                vals[p] = v.sqrt();
            }
        }
    }
    Ok(CsrMatrix::from_parts_unchecked(n, n, offsets, cols, vals))
}

/// ILU(0) on the full pattern of `m` (row-wise IKJ elimination).
///
/// No shifting is attempted: a zero pivot is reported with its row index.
pub fn ilu0(m: &CsrMatrix) -> Result<IncompleteFactor> {
    check_dim("ilu0", m.nrows(), m.ncols())?;
    let n = m.nrows();
    let offsets = m.row_offsets();
    let cols = m.col_indices();
    let mut vals = m.values().to_vec();
    let mut diag = vec![0usize; n];
    for i in 0..n {
        diag[i] = match m.row(i).0.binary_search(&i) {
            Ok(p) => offsets[i] + p,
            Err(_) => return Err(Error::ZeroPivot { index: i }),
        };
    }
    let mut pos = vec![usize::MAX; n];
    for i in 0..n {
        let (s, e) = (offsets[i], offsets[i + 1]);
        for p in s..e {
            pos[cols[p]] = p;
        }
        for p in s..diag[i] {
            let k = cols[p];
            let pivot = vals[diag[k]];
            if pivot == 0.0 {
                return Err(Error::ZeroPivot { index: k });
            }
            let lik = vals[p] / pivot;
            vals[p] = lik;
            for q in diag[k] + 1..offsets[k + 1] {
                let target = pos[cols[q]];
                if target != usize::MAX {
                    vals[target] -= lik * vals[q];
                }
            }
        }
        if vals[diag[i]] == 0.0 || !vals[diag[i]].is_finite() {
            return Err(Error::ZeroPivot { index: i });
        }
        for p in s..e {
            pos[cols[p]] = usize::MAX;
        }
    }

    let mut l_trip = Vec::new();
    let mut u_trip = Vec::new();
    for i in 0..n {
        for p in offsets[i]..offsets[i + 1] {
            let j = cols[p];
            if j < i {
                l_trip.push((i, j, vals[p]));
            } else {
                u_trip.push((i, j, vals[p]));
            }
        }
        l_trip.push((i, i, 1.0));
    }
    Ok(IncompleteFactor {
        kind: IncompleteKind::Ilu0,
        l: CsrMatrix::from_triplets(n, n, &l_trip)?,
        ut: Some(CsrMatrix::from_triplets(n, n, &u_trip)?),
        shift_used: 0.0,
    })
}
