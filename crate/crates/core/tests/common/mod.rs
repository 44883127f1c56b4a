//! Shared fixtures and nalgebra oracles for the integration tests.
#![allow(dead_code)]

use lrsplit::operator::LowRankUpdatedOperator;
use lrsplit::rng;
use lrsplit::sparse::{CsrMatrix, DenseMatrix, TallMatrix};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub fn na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn na_csr(m: &CsrMatrix) -> DMatrix<f64> {
    na(&m.to_dense())
}

pub fn from_na(m: &DMatrix<f64>) -> DenseMatrix {
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn vec_na(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

pub fn rel_err_mat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn normal_vec(seed: u64, n: usize) -> Vec<f64> {
    rng::normal_vec(&mut rng::seeded(seed), n)
}

/// Random sparse matrix with roughly `density` of its entries set.
pub fn rand_csr(m: usize, n: usize, density: f64, seed: u64) -> CsrMatrix {
    let mut r = rng::seeded(seed);
    let mut t = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if r.random::<f64>() < density {
                t.push((i, j, r.random::<f64>() * 2.0 - 1.0));
            }
        }
    }
    CsrMatrix::from_triplets(m, n, &t).unwrap()
}

pub fn rand_dense(m: usize, n: usize, seed: u64) -> DenseMatrix {
    DenseMatrix::new(m, n, normal_vec(seed, m * n)).unwrap()
}

/// `GᵀG + I` for a random dense `G`, stored sparse.
pub fn random_spd(n: usize, seed: u64) -> CsrMatrix {
    let g = na(&rand_dense(n, n, seed));
    let m = g.transpose() * &g + DMatrix::identity(n, n);
    CsrMatrix::from_dense(&from_na(&m))
}

/// Sparse SPD with eigenvalues spread over `[1, cond]`: tridiagonal-ish.
pub fn random_sparse_spd(n: usize, seed: u64) -> CsrMatrix {
    let s = rand_csr(n, n, 3.0 / n as f64, seed);
    let sym = s.add_scaled(&s.transpose(), 1.0).unwrap();
    let shift = sym.to_dense().row_norms_sq().iter().fold(0.0f64, |a, v| a.max(v.sqrt()));
    sym.add_diagonal(shift * 1.5 + 1.0)
}

/// `A = S + K` with `S` SPD and `K` skew: `A + Aᵀ = 2S` is PD.
pub fn random_pd_nonsym(n: usize, seed: u64) -> CsrMatrix {
    let s = random_sparse_spd(n, seed);
    let k = rand_csr(n, n, 3.0 / n as f64, seed + 1000);
    let skew = k.add_scaled(&k.transpose(), -1.0).unwrap();
    s.add_scaled(&skew, 2.0).unwrap()
}

pub fn laplacian_2d(g: usize) -> CsrMatrix {
    let idx = |i: usize, j: usize| i * g + j;
    let mut t = Vec::new();
    for i in 0..g {
        for j in 0..g {
            t.push((idx(i, j), idx(i, j), 4.0));
            if i > 0 {
                t.push((idx(i, j), idx(i - 1, j), -1.0));
            }
            if i + 1 < g {
                t.push((idx(i, j), idx(i + 1, j), -1.0));
            }
            if j > 0 {
                t.push((idx(i, j), idx(i, j - 1), -1.0));
            }
            if j + 1 < g {
                t.push((idx(i, j), idx(i, j + 1), -1.0));
            }
        }
    }
    CsrMatrix::from_triplets(g * g, g * g, &t).unwrap()
}

/// Central-difference convection-diffusion, 5-point, nonsymmetric.
pub fn convection_diffusion_2d(g: usize, peclet: f64) -> CsrMatrix {
    let idx = |i: usize, j: usize| i * g + j;
    let mut t = Vec::new();
    for i in 0..g {
        for j in 0..g {
            t.push((idx(i, j), idx(i, j), 4.0));
            if i > 0 {
                t.push((idx(i, j), idx(i - 1, j), -1.0 - peclet));
            }
            if i + 1 < g {
                t.push((idx(i, j), idx(i + 1, j), -1.0 + peclet));
            }
            if j > 0 {
                t.push((idx(i, j), idx(i, j - 1), -1.0 - 0.5 * peclet));
            }
            if j + 1 < g {
                t.push((idx(i, j), idx(i, j + 1), -1.0 + 0.5 * peclet));
            }
        }
    }
    CsrMatrix::from_triplets(g * g, g * g, &t).unwrap()
}

pub fn tridiag(n: usize, lo: f64, d: f64, hi: f64) -> CsrMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, d));
        if i > 0 {
            t.push((i, i - 1, lo));
        }
        if i + 1 < n {
            t.push((i, i + 1, hi));
        }
    }
    CsrMatrix::from_triplets(n, n, &t).unwrap()
}

pub fn op(a: CsrMatrix, u: DenseMatrix, gamma: f64) -> LowRankUpdatedOperator {
    LowRankUpdatedOperator::new(a, TallMatrix::Dense(u), gamma).unwrap()
}

pub fn zero_u(a: CsrMatrix, gamma: f64) -> LowRankUpdatedOperator {
    let n = a.nrows();
    LowRankUpdatedOperator::new(a, TallMatrix::Sparse(CsrMatrix::zeros(n, 1)), gamma).unwrap()
}

/// Dense `A + γUUᵀ` computed with nalgebra from the stored parts.
pub fn assemble_na(o: &LowRankUpdatedOperator) -> DMatrix<f64> {
    let a = na_csr(&o.effective_a());
    let u = na(&o.effective_u().to_dense());
    a + o.gamma() * &u * u.transpose()
}

/// Complex eigenvalues via nalgebra's Schur decomposition.
pub fn na_eigs(m: &DMatrix<f64>) -> Vec<(f64, f64)> {
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|c| (c.re, c.im))
        .collect()
}

/// Greedy matching distance between two eigenvalue multisets.
pub fn multiset_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, ((x.0 - y.0).powi(2) + (x.1 - y.1).powi(2)).sqrt()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// `(αI + γUUᵀ)⁻¹` through the SVD `U = QΣVᵀ`:
/// `α⁻¹(I − QQᵀ) + Q diag(1/(α + γσ²)) Qᵀ`. Accurate even when `γσ²/α` is huge,
/// unlike a direct LU inverse.
pub fn smw_oracle(u: &DMatrix<f64>, alpha: f64, gamma: f64) -> DMatrix<f64> {
    let n = u.nrows();
    let svd = u.clone().svd(true, false);
    let q = svd.u.unwrap();
    let mut m = DMatrix::identity(n, n) / alpha;
    for (j, s) in svd.singular_values.iter().enumerate() {
        let c = q.column(j);
        let w = 1.0 / (alpha + gamma * s * s) - 1.0 / alpha;
        m += w * &c * c.transpose();
    }
    m
}
