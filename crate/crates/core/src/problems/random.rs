//! Seeded random test families.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{normal_vec, seeded, Rng};
use crate::sparse::{CsrMatrix, DenseMatrix};

/// Layers of adjacent Givens rotations used to mix the eigenbasis.
pub const SPD_ROTATION_LAYERS: usize = 3;

/// Bandwidth of the generated SPD matrix: `Q` has bandwidth equal to the
/// layer count, so `Q diag(d) Qᵀ` has at most twice that.
pub const SPD_BANDWIDTH: usize = 2 * SPD_ROTATION_LAYERS;

fn check_dims(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!(
            "need 1 <= k < n, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// SPD `A = Q diag(d) Qᵀ` with `d` log-spaced from `1/cond` to 1 and `Q` a
/// product of [`SPD_ROTATION_LAYERS`] layers of random adjacent Givens rotations,
/// so `A` is banded (see [`SPD_BANDWIDTH`]) and `‖A‖₂ = 1`. `U` is Gaussian with unit-norm columns.
pub fn gen_random_spd_lowrank(
    n: usize,
    k: usize,
    cond: f64,
    seed: u64,
) -> Result<(CsrMatrix, DenseMatrix)> {
    check_dims(n, k)?;
    if !(cond >= 1.0) || !cond.is_finite() {
        return Err(Error::InvalidInput(format!(
            "condition target must be >= 1, got {cond}"
        )));
    }
    let mut rng = seeded(seed);
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let t = if n == 1 {
                1.0
            } else {
                i as f64 / (n - 1) as f64
            };
            cond.powf(t - 1.0)
        })
        .collect();

    // Banded storage: band[i][j + w - i] holds A[i][j] for |i − j| <= w.
    let w = SPD_BANDWIDTH + 1;
    let mut band = vec![vec![0.0; 2 * w + 1]; n];
    for i in 0..n {
        band[i][w] = d[i];
    }
    let idx = |i: usize, j: usize| j + w - i;
    for layer in 0..SPD_ROTATION_LAYERS {
        let mut p = layer % 2;
        while p + 1 < n {
            let q = p + 1;
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let (s, c) = theta.sin_cos();
            let lo = p.saturating_sub(SPD_BANDWIDTH);
            let hi = (q + SPD_BANDWIDTH).min(n - 1);
            // Rows: A ← G A.
            for j in lo..=hi {
                let (ap, aq) = (band[p][idx(p, j)], band[q][idx(q, j)]);
                band[p][idx(p, j)] = c * ap - s * aq;
                band[q][idx(q, j)] = s * ap + c * aq;
            }
            // Columns: A ← A Gᵀ.
            for i in lo..=hi {
                let (ap, aq) = (band[i][idx(i, p)], band[i][idx(i, q)]);
                band[i][idx(i, p)] = c * ap - s * aq;
                band[i][idx(i, q)] = s * ap + c * aq;
            }
            p += 2;
        }
    }
    let mut t = Vec::new();
    for i in 0..n {
        for j in i.saturating_sub(w)..=(i + w).min(n - 1) {
            // Average the two triangles so A is symmetric to the last bit.
            let v = 0.5 * (band[i][idx(i, j)] + band[j][idx(j, i)]);
            if v != 0.0 {
                t.push((i, j, v));
            }
        }
    }
    let a = CsrMatrix::from_triplets(n, n, &t)?;

    let mut u = DenseMatrix::from_fn(n, k, |_, _| StandardNormal.sample(&mut rng));
    for j in 0..k {
        let col = u.column_mut(j);
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        col.iter_mut().for_each(|v| *v /= norm);
    }
    Ok((a, u))
}

fn log_uniform(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Interior-point Schur complement data.
#[derive(Debug, Clone)]
pub struct KktData {
    /// Shifted 1D Laplacian `tridiag(−1, 2, −1) + 0.1·I`.
    pub h: CsrMatrix,
    /// k×n, full row rank.
    pub c: CsrMatrix,
    pub z: Vec<f64>,
    pub lambda: Vec<f64>,
}

/// Nonzeros per row of `C` besides the pivot.
const KKT_EXTRA_PER_ROW: usize = 3;

/// `C` has a pivot `1 + |N(0,1)|` in column `⌊i·n/k⌋` of row `i` and a few
/// Gaussian entries in non-pivot columns, so its pivot columns form a
/// nonsingular diagonal block. `z` and `λ` are log-uniform in `[1e-2, 1e2]`.
pub fn gen_kkt_schur(n: usize, k: usize, seed: u64) -> Result<KktData> {
    check_dims(n, k)?;
    let mut rng = seeded(seed);
    let mut ht = Vec::new();
    for i in 0..n {
        ht.push((i, i, 2.1));
        if i + 1 < n {
            ht.push((i, i + 1, -1.0));
            ht.push((i + 1, i, -1.0));
        }
    }
    let h = CsrMatrix::from_triplets(n, n, &ht)?;

    let pivots: Vec<usize> = (0..k).map(|i| i * n / k).collect();
    let mut is_pivot = vec![false; n];
    pivots.iter().for_each(|&p| is_pivot[p] = true);
    let free: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
    let mut ct = Vec::new();
    for (i, &p) in pivots.iter().enumerate() {
        let g: f64 = StandardNormal.sample(&mut rng);
        ct.push((i, p, 1.0 + g.abs()));
        for _ in 0..KKT_EXTRA_PER_ROW {
            let j = free[rng.random_range(0..free.len())];
            let g: f64 = StandardNormal.sample(&mut rng);
            ct.push((i, j, g));
        }
    }
    let c = CsrMatrix::from_triplets(k, n, &ct)?;
    let z = (0..k).map(|_| log_uniform(&mut rng, 1e-2, 1e2)).collect();
    let lambda = (0..k).map(|_| log_uniform(&mut rng, 1e-2, 1e2)).collect();
    Ok(KktData { h, c, z, lambda })
}

/// Least-squares data `min ‖[B₁; B₂]x − c‖`.
#[derive(Debug, Clone)]
pub struct LsData {
    pub b1: CsrMatrix,
    pub b2: DenseMatrix,
    pub c: Vec<f64>,
}

/// `B₁` (m1×n) has Gaussian entries at the given density. In full-rank mode
/// the identity is added to its leading n×n block (requires `m1 >= n`); in
/// rank-deficient mode its last column duplicates the first. `B₂` (k×n) is
/// dense Gaussian and `c` has `m1 + k` Gaussian entries.
pub fn gen_sparse_dense_ls(
    m1: usize,
    k: usize,
    n: usize,
    density: f64,
    rank_deficient: bool,
    seed: u64,
) -> Result<LsData> {
    check_dims(n, k)?;
    if n < 2 || m1 == 0 {
        return Err(Error::InvalidInput(format!(
            "need n >= 2 and m1 >= 1, got n = {n}, m1 = {m1}"
        )));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "density must lie in (0, 1], got {density}"
        )));
    }
    if !rank_deficient && m1 < n {
        return Err(Error::InvalidInput(format!(
            "full-rank mode needs m1 >= n, got m1 = {m1}, n = {n}"
        )));
    }
    let mut rng = seeded(seed);
    let mut t = Vec::new();
    for i in 0..m1 {
        for j in 0..n {
            if rng.random::<f64>() < density {
                let g: f64 = StandardNormal.sample(&mut rng);
                t.push((i, j, g));
            }
        }
        if !rank_deficient && i < n {
            t.push((i, i, 1.0));
        }
    }
    if rank_deficient {
        let dup: Vec<_> = t
            .iter()
            .filter(|e| e.1 == 0)
            .map(|&(i, _, v)| (i, n - 1, v))
            .collect();
        t.retain(|e| e.1 != n - 1);
        t.extend(dup);
    }
    let b1 = CsrMatrix::from_triplets(m1, n, &t)?;
    let b2 = DenseMatrix::from_fn(k, n, |_, _| StandardNormal.sample(&mut rng));
    let c = normal_vec(&mut rng, m1 + k);
    Ok(LsData { b1, b2, c })
}
