//! Substitution with CSR triangular factors.

use crate::error::{check_dim, Error, Result};
use crate::sparse::CsrMatrix;

fn diag_of(cols: &[usize], vals: &[f64], i: usize) -> Result<f64> {
    match cols.binary_search(&i) {
        Ok(p) if vals[p] != 0.0 => Ok(vals[p]),
        _ => Err(Error::ZeroPivot { index: i }),
    }
}

pub(crate) fn lower_in_place(l: &CsrMatrix, x: &mut [f64], unit: bool) -> Result<()> {
    for i in 0..l.nrows() {
        let (cols, vals) = l.row(i);
        let mut acc = x[i];
        for (&j, &v) in cols.iter().zip(vals) {
            if j >= i {
                break;
            }
            acc -= v * x[j];
        }
        x[i] = if unit {
            acc
        } else {
            acc / diag_of(cols, vals, i)?
        };
    }
    Ok(())
}

pub(crate) fn upper_in_place(u: &CsrMatrix, x: &mut [f64]) -> Result<()> {
    for i in (0..u.nrows()).rev() {
        let (cols, vals) = u.row(i);
        let mut acc = x[i];
        for (&j, &v) in cols.iter().zip(vals).rev() {
            if j <= i {
                break;
            }
            acc -= v * x[j];
        }
        x[i] = acc / diag_of(cols, vals, i)?;
    }
    Ok(())
}

pub(crate) fn lower_transpose_in_place(l: &CsrMatrix, x: &mut [f64]) -> Result<()> {
    for i in (0..l.nrows()).rev() {
        let (cols, vals) = l.row(i);
        let xi = x[i] / diag_of(cols, vals, i)?;
        x[i] = xi;
        for (&j, &v) in cols.iter().zip(vals) {
            if j >= i {
                break;
            }
            x[j] -= v * xi;
        }
    }
    Ok(())
}

/// Solves `Lx = b` for lower-triangular `L` (entries above the diagonal are ignored).
pub fn solve_lower(l: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_dim("solve_lower", l.nrows(), b.len())?;
    let mut x = b.to_vec();
    lower_in_place(l, &mut x, false)?;
    Ok(x)
}

/// Solves `Lx = b` where `L` has a unit diagonal (stored or not).
pub fn solve_unit_lower(l: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_dim("solve_unit_lower", l.nrows(), b.len())?;
    let mut x = b.to_vec();
    lower_in_place(l, &mut x, true)?;
    Ok(x)
}

/// Solves `Ux = b` for upper-triangular `U` (entries below the diagonal are ignored).
pub fn solve_upper(u: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_dim("solve_upper", u.nrows(), b.len())?;
    let mut x = b.to_vec();
    upper_in_place(u, &mut x)?;
    Ok(x)
}

/// Solves `Lᵀx = b` using the rows of lower-triangular `L`.
pub fn solve_lower_transpose(l: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_dim("solve_lower_transpose", l.nrows(), b.len())?;
    let mut x = b.to_vec();
    lower_transpose_in_place(l, &mut x)?;
    Ok(x)
}
