mod common;

use common::*;
use lrsplit::operator::{
    from_augmented_lagrangian, from_kkt_schur, from_normal_equations, LinearOperator,
    LowRankUpdatedOperator,
};
use lrsplit::sparse::{CsrMatrix, DenseMatrix, TallMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn random_op(n: usize, k: usize, seed: u64) -> LowRankUpdatedOperator {
    op(random_sparse_spd(n, seed), rand_dense(n, k, seed + 1), 1.7)
}

#[test]
fn apply_matches_dense_assembly() {
    let o = random_op(30, 5, 9);
    let dense = assemble_na(&o);
    let x = normal_vec(10, 30);
    assert!(rel_err(&o.apply(&x).unwrap(), (&dense * vec_na(&x)).as_slice()) <= 1e-13);
}

#[test]
fn diag_gamma_matches_assembly() {
    let o = random_op(25, 3, 2);
    let dense = assemble_na(&o);
    let d = o.diag_gamma();
    for i in 0..25 {
        assert!((d[i] - dense[(i, i)]).abs() <= 1e-14 * dense[(i, i)].abs());
    }
    let own = o.assemble_dense(100).unwrap().diagonal();
    for i in 0..25 {
        assert!((d[i] - own[i]).abs() <= 1e-14 * own[i].abs());
    }
}

#[test]
fn diagonal_scaling_gives_unit_diagonal() {
    let o = random_op(20, 4, 3).with_diagonal_scaling().unwrap();
    let dense = o.assemble_dense(100).unwrap();
    for v in dense.diagonal() {
        assert!((v - 1.0).abs() <= 1e-13);
    }
    for v in o.diag_gamma() {
        assert!((v - 1.0).abs() <= 1e-14);
    }
}

#[test]
fn scaled_apply_is_definition() {
    let base = random_op(20, 4, 4);
    let scaled = base.with_diagonal_scaling().unwrap();
    let s = scaled.scaling().unwrap().to_vec();
    let x = normal_vec(5, 20);
    let xs: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a / b).collect();
    let expect: Vec<f64> = base.apply(&xs).unwrap().iter().zip(&s).map(|(a, b)| a / b).collect();
    assert!(rel_err(&scaled.apply(&x).unwrap(), &expect) <= 1e-14);

    // Idempotent on a unit-diagonal operator.
    let again = scaled.with_diagonal_scaling().unwrap();
    assert!(rel_err(&again.apply(&x).unwrap(), &scaled.apply(&x).unwrap()) <= 1e-15);
}

#[test]
fn normalized_operator_is_scaled_original() {
    let o = random_op(30, 4, 6);
    let (nop, rec) = o.normalize(1e-10).unwrap();
    assert!((rec.gamma_tilde - o.gamma() * rec.norm_u.powi(2) / rec.norm_a).abs() < 1e-12);
    let x = normal_vec(7, 30);
    let lhs: Vec<f64> = nop.apply(&x).unwrap().iter().map(|v| v * rec.norm_a).collect();
    assert!(rel_err(&lhs, &o.apply(&x).unwrap()) <= 1e-6);
    // Norms against the SVD oracle.
    let sa = na_csr(o.a()).singular_values().max();
    let su = na(&o.u().to_dense()).singular_values().max();
    assert!((rec.norm_a - sa).abs() <= 1e-6 * sa);
    assert!((rec.norm_u - su).abs() <= 1e-6 * su);
    // Normalizing again is (nearly) a no-op.
    let (_, rec2) = nop.normalize(1e-10).unwrap();
    assert!((rec2.norm_a - 1.0).abs() < 1e-6 && (rec2.norm_u - 1.0).abs() < 1e-6);
    assert!((rec2.gamma_tilde - rec.gamma_tilde).abs() < 1e-5 * rec.gamma_tilde);
}

#[test]
fn assembly_matches_apply_columnwise() {
    let o = random_op(15, 2, 8);
    let d = o.assemble_dense(100).unwrap();
    for j in 0..15 {
        let mut e = vec![0.0; 15];
        e[j] = 1.0;
        assert!(rel_err(&o.apply(&e).unwrap(), d.column(j)) <= 1e-14);
    }
}

#[test]
fn augmented_lagrangian_assembly() {
    let (n, k) = (20, 6);
    let a = random_sparse_spd(n, 1);
    let b = rand_csr(k, n, 0.3, 2);
    let w: Vec<f64> = (0..k).map(|i| 0.5 + i as f64).collect();
    let gamma = 3.0;
    let o = from_augmented_lagrangian(a.clone(), &b, &w, gamma).unwrap();
    let winv = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        k,
        w.iter().map(|v| 1.0 / v),
    ));
    let bd = na_csr(&b);
    let expect = na_csr(&a) + gamma * bd.transpose() * winv * &bd;
    assert!(rel_err_mat(&na(&o.assemble_dense(100).unwrap()), &expect) <= 1e-13);
}

#[test]
fn kkt_schur_assembly() {
    let (n, k) = (18, 5);
    let h = random_sparse_spd(n, 3);
    let c = rand_csr(k, n, 0.3, 4);
    let z: Vec<f64> = (0..k).map(|i| 0.1 + i as f64).collect();
    let l: Vec<f64> = (0..k).map(|i| 2.0 / (1.0 + i as f64)).collect();
    let o = from_kkt_schur(h.clone(), &c, &z, &l).unwrap();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        k,
        (0..k).map(|i| l[i] / z[i]),
    ));
    let cd = na_csr(&c);
    let expect = na_csr(&h) + cd.transpose() * d * &cd;
    assert!(rel_err_mat(&na(&o.assemble_dense(100).unwrap()), &expect) <= 1e-13);
}

#[test]
fn normal_equations_assembly() {
    let (m, n, k) = (40, 15, 3);
    let b1 = rand_csr(m - k, n, 0.3, 5);
    let b2 = rand_dense(k, n, 6);
    let (o, rhs) = from_normal_equations(&b1, &b2).unwrap();
    let full = {
        let mut f = DMatrix::zeros(m, n);
        f.view_mut((0, 0), (m - k, n)).copy_from(&na_csr(&b1));
        f.view_mut((m - k, 0), (k, n)).copy_from(&na(&b2));
        f
    };
    let expect = full.transpose() * &full;
    assert!(rel_err_mat(&na(&o.assemble_dense(100).unwrap()), &expect) <= 1e-12);
    let c = normal_vec(7, m);
    assert!(rel_err(&rhs.build(&c).unwrap(), (full.transpose() * vec_na(&c)).as_slice()) <= 1e-13);
}

#[test]
fn positive_definite_probe() {
    let o = random_op(30, 3, 11);
    assert!(o.probe_positive_definite(50, 1));
    // A singular but A_γ nonsingular: diag(0, 1, 1) with U = e₁.
    let a = CsrMatrix::from_diagonal(&[0.0, 1.0, 1.0]);
    let u = DenseMatrix::from_rows(&[vec![1.0], vec![0.0], vec![0.0]]).unwrap();
    assert!(op(a, u, 1.0).probe_positive_definite(50, 2));
    let a = CsrMatrix::from_diagonal(&[-1.0, 1.0, 1.0]);
    assert!(!zero_u(a, 1.0).probe_positive_definite(50, 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn apply_linear_and_symmetric(n in 3usize..30, kf in 0.1f64..0.9, seed in any::<u64>()) {
        let k = ((n as f64 * kf) as usize).clamp(1, n - 1);
        let o = random_op(n, k, seed);
        let x = normal_vec(seed ^ 1, n);
        let y = normal_vec(seed ^ 2, n);
        let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let (ax, ay) = (o.apply(&x).unwrap(), o.apply(&y).unwrap());
        let sum: Vec<f64> = ax.iter().zip(&ay).map(|(a, b)| a + b).collect();
        prop_assert!(rel_err(&sum, &o.apply(&xy).unwrap()) <= 1e-13);
        let p: f64 = ax.iter().zip(&y).map(|(a, b)| a * b).sum();
        let q: f64 = x.iter().zip(&ay).map(|(a, b)| a * b).sum();
        prop_assert!((p - q).abs() <= 1e-12 * (p.abs() + q.abs() + 1.0));
        prop_assert!(o.probe_positive_definite(50, seed));
    }

    #[test]
    fn diag_gamma_exact(n in 3usize..25, seed in any::<u64>()) {
        let o = LowRankUpdatedOperator::new(
            random_pd_nonsym(n, seed),
            TallMatrix::Sparse(rand_csr(n, 2, 0.5, seed ^ 9)),
            0.3,
        ).unwrap();
        let d = o.diag_gamma();
        let dense = o.assemble_dense(100).unwrap();
        for i in 0..n {
            prop_assert!((d[i] - dense[(i, i)]).abs() <= 1e-14 * (1.0 + d[i].abs()));
        }
        let mut y = vec![0.0; n];
        LinearOperator::apply_into(&o, &vec![1.0; n], &mut y);
        prop_assert!(y.iter().all(|v| v.is_finite()));
    }
}
