use crate::error::{Error, Result};
use crate::sparse::DenseMatrix;

use super::{Eigenvalue, Spectrum};

/// Largest matrix accepted by [`eig_general`].
pub const GENERAL_EIG_CAP: usize = 1000;

/// Eigenvalues of a general real matrix: Householder reduction to upper
/// Hessenberg form followed by the Francis implicit double-shift QR
/// iteration. Exceptional shifts are taken after 10 and 20 iterations without
/// deflation (and every 10 thereafter); more than `100·n` iterations in total
/// is reported as non-convergence.
pub fn eig_general(m: &DenseMatrix) -> Result<Spectrum> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "eigenvalues need a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if n > GENERAL_EIG_CAP {
        return Err(Error::SizeCap {
            n,
            cap: GENERAL_EIG_CAP,
        });
    }
    if !m.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)]).collect())
        .collect();
    hessenberg(&mut a);
    let eig = hqr(&mut a)?;
    Ok(Spectrum::new(eig))
}

fn hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k + 1][k] > 0.0 { -norm } else { norm };
        for i in k + 1..n {
            v[i] = a[i][k];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // A ← (I − βvvᵀ) A
        for j in k..n {
            let s: f64 = (k + 1..n).map(|i| v[i] * a[i][j]).sum::<f64>() * beta;
            for i in k + 1..n {
                a[i][j] -= s * v[i];
            }
        }
        // A ← A (I − βvvᵀ)
        for row in a.iter_mut() {
            let s: f64 = (k + 1..n).map(|j| row[j] * v[j]).sum::<f64>() * beta;
            for j in k + 1..n {
                row[j] -= s * v[j];
            }
        }
        for i in k + 2..n {
            a[i][k] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

fn hqr(a: &mut [Vec<f64>]) -> Result<Vec<Eigenvalue>> {
    let n = a.len() as isize;
    let mut wr = vec![0.0; n as usize];
    let mut wi = vec![0.0; n as usize];
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n as usize {
        for j in i.saturating_sub(1)..n as usize {
            anorm += a[i][j].abs();
        }
    }
    let max_total = 100 * (n.max(1) as usize);
    let mut total = 0usize;

    let mut nn = n - 1;
    let mut t = 0.0;
    macro_rules! at {
        ($i:expr, $j:expr) => {
            a[($i) as usize][($j) as usize]
        };
    }
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l > 0 {
                let mut s = at!(l - 1, l - 1).abs() + at!(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if at!(l, l - 1).abs() <= eps * s {
                    at!(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = at!(nn, nn);
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = at!(nn - 1, nn - 1);
            let mut w = at!(nn, nn - 1) * at!(nn - 1, nn);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                let (i0, i1) = ((nn - 1) as usize, nn as usize);
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[i0] = x + z;
                    wr[i1] = x + z;
                    if z != 0.0 {
                        wr[i1] = x - w / z;
                    }
                    wi[i0] = 0.0;
                    wi[i1] = 0.0;
                } else {
                    wr[i0] = x + p;
                    wr[i1] = x + p;
                    wi[i0] = z;
                    wi[i1] = -z;
                }
                nn -= 2;
                break;
            }

            if total >= max_total {
                return Err(Error::NoConvergence(format!(
                    "Hessenberg QR: no convergence after {max_total} iterations"
                )));
            }
            if its > 0 && its % 10 == 0 {
                t += x;
                for i in 0..=nn {
                    at!(i, i) -= x;
                }
                let s = at!(nn, nn - 1).abs() + at!(nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;

            let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
            let mut m = nn - 2;
            while m >= l {
                let z = at!(m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / at!(m + 1, m) + at!(m, m + 1);
                q = at!(m + 1, m + 1) - z - rr - ss;
                r = at!(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = at!(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (at!(m - 1, m - 1).abs() + z.abs() + at!(m + 1, m + 1).abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nn - 1 {
                at!(i + 2, i) = 0.0;
                if i != m {
                    at!(i + 2, i - 1) = 0.0;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = at!(k, k - 1);
                    q = at!(k + 1, k - 1);
                    r = 0.0;
                    if k + 1 != nn {
                        r = at!(k + 2, k - 1);
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            at!(k, k - 1) = -at!(k, k - 1);
                        }
                    } else {
                        at!(k, k - 1) = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = at!(k, j) + q * at!(k + 1, j);
                        if k + 1 != nn {
                            pp += r * at!(k + 2, j);
                            at!(k + 2, j) -= pp * z;
                        }
                        at!(k + 1, j) -= pp * y;
                        at!(k, j) -= pp * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * at!(i, k) + y * at!(i, k + 1);
                        if k + 1 != nn {
                            pp += z * at!(i, k + 2);
                            at!(i, k + 2) -= pp * r;
                        }
                        at!(i, k + 1) -= pp * q;
                        at!(i, k) -= pp;
                    }
                }
                k += 1;
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Eigenvalue { re, im })
        .collect())
}
