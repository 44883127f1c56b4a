//! Preconditioners for `A + γUUᵀ`, all exposing `z = P⁻¹r`.
//!
//! The product form `(A + αI)(αI + γUUᵀ)` is inverted right to left: the
//! shifted `A` solve is applied to `r` first and the SMW solve second. The
//! conventional `1/(2α)` factor is not included; see
//! [`Preconditioner::inverse_scale`].

mod smw;

pub use smw::SmwSolver;

use std::fmt;
use std::str::FromStr;

use crate::error::{check_dim, Error, Result};
use crate::factor::{ic0, ilu0, DenseLu, IncompleteFactor, SparseCholesky};
use crate::operator::{LowRankUpdatedOperator, DEFAULT_DENSE_CAP};
use crate::sparse::{amd_ordering, CsrMatrix};

/// Largest n for which an exact nonsymmetric `A + αI` is factorized densely.
pub const DENSE_LU_CAP: usize = DEFAULT_DENSE_CAP;

/// Shift retries allowed when IC(0) breaks down.
pub const IC_SHIFT_RETRIES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecondKind {
    Product,
    ProductInexact,
    Symmetrized,
    SymmetrizedInexact,
    Unshifted,
    ShiftOnly,
    #[serde(alias = "none")]
    Identity,
}

impl PrecondKind {
    pub const ALL: [PrecondKind; 7] = [
        PrecondKind::Product,
        PrecondKind::ProductInexact,
        PrecondKind::Symmetrized,
        PrecondKind::SymmetrizedInexact,
        PrecondKind::Unshifted,
        PrecondKind::ShiftOnly,
        PrecondKind::Identity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrecondKind::Product => "product",
            PrecondKind::ProductInexact => "product-inexact",
            PrecondKind::Symmetrized => "symmetrized",
            PrecondKind::SymmetrizedInexact => "symmetrized-inexact",
            PrecondKind::Unshifted => "unshifted",
            PrecondKind::ShiftOnly => "shift-only",
            PrecondKind::Identity => "identity",
        }
    }

    /// Whether the preconditioner is symmetric positive definite for SPD `A`.
    pub fn is_spd_for_spd(self) -> bool {
        matches!(
            self,
            PrecondKind::Symmetrized
                | PrecondKind::SymmetrizedInexact
                | PrecondKind::ShiftOnly
                | PrecondKind::Identity
        )
    }
}

impl fmt::Display for PrecondKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrecondKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            return Ok(PrecondKind::Identity);
        }
        PrecondKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = PrecondKind::ALL.iter().map(|k| k.name()).collect();
                Error::InvalidInput(format!(
                    "unknown preconditioner '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Exact factorization or a no-fill incomplete one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Inexact,
}

/// A fixed linear map `r ↦ P⁻¹r`.
pub trait Preconditioner: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn kind(&self) -> PrecondKind;

    /// `z = P⁻¹r`; lengths must already match `dim()`.
    fn apply_into(&self, r: &[f64], z: &mut [f64]);

    fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_dim("preconditioner apply", self.dim(), r.len())?;
        let mut z = vec![0.0; r.len()];
        self.apply_into(r, &mut z);
        Ok(z)
    }

    /// Factor relating `apply` to the inverse of the preconditioner in its
    /// conventional scaling: `2α` for the product and symmetrized forms,
    /// whose `1/(2α)` prefactor is dropped, and 1 otherwise.
    fn inverse_scale(&self) -> f64 {
        1.0
    }
}

/// Solver for `A + αI`: exact or incomplete.
#[derive(Debug, Clone)]
pub(crate) enum ShiftedSolver {
    Cholesky(SparseCholesky),
    Lu(DenseLu),
    Incomplete(IncompleteFactor),
}

impl ShiftedSolver {
    pub(crate) fn exact(a: &CsrMatrix, symmetric: bool) -> Result<Self> {
        if symmetric {
            let perm = amd_ordering(a);
            return Ok(ShiftedSolver::Cholesky(SparseCholesky::factor(a, &perm)?));
        }
        if a.nrows() > DENSE_LU_CAP {
            return Err(Error::SizeCap {
                n: a.nrows(),
                cap: DENSE_LU_CAP,
            });
        }
        Ok(ShiftedSolver::Lu(DenseLu::factor(&a.to_dense())?))
    }

    fn incomplete(a: &CsrMatrix, symmetric: bool) -> Result<Self> {
        let f = if symmetric {
            ic0(a, IC_SHIFT_RETRIES)?
        } else {
            ilu0(a)?
        };
        Ok(ShiftedSolver::Incomplete(f))
    }

    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        match self {
            ShiftedSolver::Cholesky(c) => {
                let y = c.solve(x).expect("length checked");
                x.copy_from_slice(&y);
            }
            ShiftedSolver::Lu(lu) => lu.solve_in_place(x),
            ShiftedSolver::Incomplete(f) => f.solve_in_place(x),
        }
    }

    fn incomplete_shift(&self) -> f64 {
        match self {
            ShiftedSolver::Incomplete(f) => f.shift_used(),
            _ => 0.0,
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "alpha must be positive, got {alpha}"
        )))
    }
}

/// `(A + αI)(αI + γUUᵀ)`, or `M_α(αI + γUUᵀ)` with `M_α ≈ A + αI` incomplete.
#[derive(Debug, Clone)]
pub struct ProductPreconditioner {
    alpha: f64,
    mode: Mode,
    shifted: ShiftedSolver,
    smw: SmwSolver,
}

/// Builds the product preconditioner for the (possibly scaled) operator.
///
/// Exact mode uses sparse Cholesky of `A + αI` when `A` is symmetric and a
/// dense LU otherwise (n up to [`DENSE_LU_CAP`]). Inexact mode uses IC(0)
/// for symmetric `A` and ILU(0) otherwise.
pub fn build_product(
    op: &LowRankUpdatedOperator,
    alpha: f64,
    mode: Mode,
) -> Result<ProductPreconditioner> {
    check_alpha(alpha)?;
    let shifted_a = op.effective_a().add_diagonal(alpha);
    let symmetric = op.is_symmetric();
    let shifted = match mode {
        Mode::Exact => ShiftedSolver::exact(&shifted_a, symmetric)?,
        Mode::Inexact => ShiftedSolver::incomplete(&shifted_a, symmetric)?,
    };
    let smw = SmwSolver::build(&op.effective_u(), alpha, op.gamma())?;
    Ok(ProductPreconditioner {
        alpha,
        mode,
        shifted,
        smw,
    })
}

impl ProductPreconditioner {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn smw(&self) -> &SmwSolver {
        &self.smw
    }

    /// Diagonal shift IC(0) needed to complete, 0 when none.
    pub fn incomplete_shift(&self) -> f64 {
        self.shifted.incomplete_shift()
    }
}

impl Preconditioner for ProductPreconditioner {
    fn dim(&self) -> usize {
        self.smw.n()
    }

    fn kind(&self) -> PrecondKind {
        match self.mode {
            Mode::Exact => PrecondKind::Product,
            Mode::Inexact => PrecondKind::ProductInexact,
        }
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        let mut y = r.to_vec();
        self.shifted.solve_in_place(&mut y);
        self.smw.apply_into(&y, z);
    }

    fn inverse_scale(&self) -> f64 {
        2.0 * self.alpha
    }
}

#[derive(Debug, Clone)]
enum SymFactor {
    Exact(SparseCholesky),
    Incomplete(IncompleteFactor),
}

/// `L(αI + γUUᵀ)Lᵀ` with `LLᵀ = A + αI` (exact) or `LLᵀ ≈ A + αI` (IC(0)).
///
/// In exact mode `L` is the Cholesky factor under a fill-reducing
/// permutation `P`, i.e. `Pᵀ L`.
#[derive(Debug, Clone)]
pub struct SymmetrizedPreconditioner {
    alpha: f64,
    mode: Mode,
    factor: SymFactor,
    smw: SmwSolver,
}

pub fn build_symmetrized(
    op: &LowRankUpdatedOperator,
    alpha: f64,
    mode: Mode,
) -> Result<SymmetrizedPreconditioner> {
    check_alpha(alpha)?;
    if !op.is_symmetric() {
        return Err(Error::NotSymmetric {
            asymmetry: op.effective_a().relative_asymmetry(),
        });
    }
    let shifted_a = op.effective_a().add_diagonal(alpha);
    let factor = match mode {
        Mode::Exact => {
            let perm = amd_ordering(&shifted_a);
            SymFactor::Exact(SparseCholesky::factor(&shifted_a, &perm)?)
        }
        Mode::Inexact => SymFactor::Incomplete(ic0(&shifted_a, IC_SHIFT_RETRIES)?),
    };
    let smw = SmwSolver::build(&op.effective_u(), alpha, op.gamma())?;
    Ok(SymmetrizedPreconditioner {
        alpha,
        mode,
        factor,
        smw,
    })
}

impl SymmetrizedPreconditioner {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `y ← L⁻¹y`.
    pub fn solve_l_in_place(&self, y: &mut [f64]) {
        match &self.factor {
            SymFactor::Exact(c) => {
                let mut t: Vec<f64> = c.perm().iter().map(|&p| y[p]).collect();
                c.forward_in_place(&mut t);
                y.copy_from_slice(&t);
            }
            SymFactor::Incomplete(f) => f.solve_l_in_place(y),
        }
    }

    /// `y ← L⁻ᵀy`.
    pub fn solve_lt_in_place(&self, y: &mut [f64]) {
        match &self.factor {
            SymFactor::Exact(c) => {
                c.backward_in_place(y);
                let t = y.to_vec();
                for (i, &p) in c.perm().iter().enumerate() {
                    y[p] = t[i];
                }
            }
            SymFactor::Incomplete(f) => f.solve_lt_in_place(y),
        }
    }

    pub fn smw(&self) -> &SmwSolver {
        &self.smw
    }
}

impl Preconditioner for SymmetrizedPreconditioner {
    fn dim(&self) -> usize {
        self.smw.n()
    }

    fn kind(&self) -> PrecondKind {
        match self.mode {
            Mode::Exact => PrecondKind::Symmetrized,
            Mode::Inexact => PrecondKind::SymmetrizedInexact,
        }
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        let mut y = r.to_vec();
        self.solve_l_in_place(&mut y);
        self.smw.apply_into(&y, z);
        self.solve_lt_in_place(z);
    }

    fn inverse_scale(&self) -> f64 {
        2.0 * self.alpha
    }
}

/// `A(αI + γUUᵀ)` for SPD `A`; without the SMW part it is exactly `A`.
#[derive(Debug, Clone)]
pub struct UnshiftedPreconditioner {
    chol: SparseCholesky,
    smw: Option<SmwSolver>,
}

fn factor_spd(a: &CsrMatrix, symmetric: bool) -> Result<SparseCholesky> {
    let advice = "A is not SPD; use the shifted product preconditioner instead";
    if !symmetric {
        return Err(Error::InvalidInput(advice.into()));
    }
    let perm = amd_ordering(a);
    SparseCholesky::factor(a, &perm).map_err(|e| match e {
        Error::NotPositiveDefinite { index, pivot } => Error::InvalidInput(format!(
            "{advice} (Cholesky pivot {pivot:e} at row {index})"
        )),
        e => e,
    })
}

pub fn build_unshifted(op: &LowRankUpdatedOperator, alpha: f64) -> Result<UnshiftedPreconditioner> {
    check_alpha(alpha)?;
    let chol = factor_spd(&op.effective_a(), op.is_symmetric())?;
    let smw = SmwSolver::build(&op.effective_u(), alpha, op.gamma())?;
    Ok(UnshiftedPreconditioner {
        chol,
        smw: Some(smw),
    })
}

/// The exact `A⁻¹` preconditioner (the unshifted form with its low-rank
/// factor disabled).
pub fn build_a_inverse(op: &LowRankUpdatedOperator) -> Result<UnshiftedPreconditioner> {
    let chol = factor_spd(&op.effective_a(), op.is_symmetric())?;
    Ok(UnshiftedPreconditioner { chol, smw: None })
}

impl Preconditioner for UnshiftedPreconditioner {
    fn dim(&self) -> usize {
        self.chol.dim()
    }

    fn kind(&self) -> PrecondKind {
        PrecondKind::Unshifted
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        let y = self.chol.solve(r).expect("length checked");
        match &self.smw {
            Some(s) => s.apply_into(&y, z),
            None => z.copy_from_slice(&y),
        }
    }
}

/// `M_α ≈ A + αI` alone: IC(0) for symmetric `A`, ILU(0) otherwise.
#[derive(Debug, Clone)]
pub struct ShiftOnlyPreconditioner {
    factor: IncompleteFactor,
}

pub fn build_shift_only(
    op: &LowRankUpdatedOperator,
    alpha: f64,
) -> Result<ShiftOnlyPreconditioner> {
    check_alpha(alpha)?;
    let shifted_a = op.effective_a().add_diagonal(alpha);
    let factor = if op.is_symmetric() {
        ic0(&shifted_a, IC_SHIFT_RETRIES)?
    } else {
        ilu0(&shifted_a)?
    };
    Ok(ShiftOnlyPreconditioner { factor })
}

impl ShiftOnlyPreconditioner {
    pub fn factor(&self) -> &IncompleteFactor {
        &self.factor
    }
}

impl Preconditioner for ShiftOnlyPreconditioner {
    fn dim(&self) -> usize {
        self.factor.dim()
    }

    fn kind(&self) -> PrecondKind {
        PrecondKind::ShiftOnly
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
        self.factor.solve_in_place(z);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityPreconditioner {
    n: usize,
}

impl IdentityPreconditioner {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl Preconditioner for IdentityPreconditioner {
    fn dim(&self) -> usize {
        self.n
    }

    fn kind(&self) -> PrecondKind {
        PrecondKind::Identity
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// Builds any preconditioner kind behind a trait object.
pub fn build(
    kind: PrecondKind,
    op: &LowRankUpdatedOperator,
    alpha: f64,
) -> Result<Box<dyn Preconditioner>> {
    Ok(match kind {
        PrecondKind::Product => Box::new(build_product(op, alpha, Mode::Exact)?),
        PrecondKind::ProductInexact => Box::new(build_product(op, alpha, Mode::Inexact)?),
        PrecondKind::Symmetrized => Box::new(build_symmetrized(op, alpha, Mode::Exact)?),
        PrecondKind::SymmetrizedInexact => Box::new(build_symmetrized(op, alpha, Mode::Inexact)?),
        PrecondKind::Unshifted => Box::new(build_unshifted(op, alpha)?),
        PrecondKind::ShiftOnly => Box::new(build_shift_only(op, alpha)?),
        PrecondKind::Identity => Box::new(IdentityPreconditioner::new(op.n())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{DenseMatrix, TallMatrix};

    fn op(a: CsrMatrix) -> LowRankUpdatedOperator {
        let n = a.nrows();
        LowRankUpdatedOperator::new(a, TallMatrix::Sparse(CsrMatrix::zeros(n, 1)), 1.0).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol * (1.0 + y.abs()), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn product_identity_halves() {
        let op = op(CsrMatrix::identity(3));
        for mode in [Mode::Exact, Mode::Inexact] {
            let p = build_product(&op, 1.0, mode).unwrap();
            close(
                &p.apply(&[2.0, 4.0, -2.0]).unwrap(),
                &[1.0, 2.0, -1.0],
                1e-15,
            );
            assert_eq!(p.inverse_scale(), 2.0);
        }
    }

    #[test]
    fn product_diagonal_closed_form() {
        let d = [1.0, 3.0, 0.5];
        let op = op(CsrMatrix::from_diagonal(&d));
        let alpha = 0.7;
        let p = build_product(&op, alpha, Mode::Exact).unwrap();
        let z = p.apply(&[1.0, 1.0, 1.0]).unwrap();
        let expected: Vec<f64> = d.iter().map(|a| 1.0 / (alpha * (a + alpha))).collect();
        close(&z, &expected, 1e-15);
    }

    #[test]
    fn symmetrized_closed_forms() {
        let p = build_symmetrized(&op(CsrMatrix::identity(2)), 1.0, Mode::Exact).unwrap();
        close(&p.apply(&[1.0, -3.0]).unwrap(), &[0.5, -1.5], 1e-15);
        let p = build_symmetrized(&op(CsrMatrix::from_diagonal(&[3.0; 2])), 1.0, Mode::Inexact)
            .unwrap();
        close(&p.apply(&[4.0, 8.0]).unwrap(), &[1.0, 2.0], 1e-15);
    }

    #[test]
    fn symmetrized_rejects_nonsymmetric() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(
            build_symmetrized(&op(a), 1.0, Mode::Exact),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn unshifted_closed_forms() {
        let p = build_unshifted(&op(CsrMatrix::from_diagonal(&[2.0; 3])), 1.0).unwrap();
        close(&p.apply(&[2.0, 4.0, 6.0]).unwrap(), &[1.0, 2.0, 3.0], 1e-15);
        let indefinite = CsrMatrix::from_diagonal(&[1.0, -1.0, 1.0]);
        let err = build_unshifted(&op(indefinite), 1.0).unwrap_err();
        assert!(err.to_string().contains("shifted"), "{err}");
    }

    #[test]
    fn a_inverse_is_exact() {
        let a =
            CsrMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)])
                .unwrap();
        let p = build_a_inverse(&op(a.clone())).unwrap();
        let z = p.apply(&[3.0, 3.0]).unwrap();
        close(&z, &[1.0, 1.0], 1e-15);
    }

    #[test]
    fn shift_only_diagonal() {
        let p = build_shift_only(&op(CsrMatrix::from_diagonal(&[1.0, 3.0])), 1.0).unwrap();
        close(&p.apply(&[2.0, 4.0]).unwrap(), &[1.0, 1.0], 1e-15);
    }

    #[test]
    fn nonsymmetric_exact_uses_dense_lu() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, -1.0)]).unwrap();
        let u = DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let op = LowRankUpdatedOperator::new(a, u, 1.0).unwrap();
        let p = build_product(&op, 1.0, Mode::Exact).unwrap();
        // (A + I)(I + e₁e₁ᵀ) applied to z must give r.
        let r = [1.0, 2.0];
        let z = p.apply(&r).unwrap();
        let w = [2.0 * z[0], z[1]];
        let back = [w[0] + w[1], -w[0] + w[1]];
        close(&back, &r, 1e-14);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in PrecondKind::ALL {
            assert_eq!(k.name().parse::<PrecondKind>().unwrap(), k);
        }
        assert!("bogus".parse::<PrecondKind>().is_err());
    }
}
