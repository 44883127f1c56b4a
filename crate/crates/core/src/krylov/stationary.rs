use std::time::Instant;

use crate::error::{check_dim, Result};
use crate::krylov::{ensure_finite, norm, residual, SolveOptions, SolveReport};
use crate::operator::{LinearOperator, LowRankUpdatedOperator};
use crate::precond::{check_alpha, ShiftedSolver, SmwSolver};

/// The alternating splitting iteration
///
/// ```text
/// (αI + A)   x½   = (αI − γUUᵀ) xᵏ + b
/// (αI + γUUᵀ) xᵏ⁺¹ = (αI − A)    x½ + b
/// ```
///
/// on the operator's effective (possibly scaled) system. Both half-steps are
/// solved exactly: sparse Cholesky for symmetric `A`, dense LU otherwise.
#[derive(Debug)]
pub struct StationaryIteration<'a> {
    op: &'a LowRankUpdatedOperator,
    alpha: f64,
    a: crate::sparse::CsrMatrix,
    u: crate::sparse::TallMatrix,
    shifted: ShiftedSolver,
    smw: SmwSolver,
}

impl<'a> StationaryIteration<'a> {
    pub fn new(op: &'a LowRankUpdatedOperator, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let a = op.effective_a();
        let u = op.effective_u();
        let shifted = ShiftedSolver::exact(&a.add_diagonal(alpha), op.is_symmetric())?;
        let smw = SmwSolver::build(&u, alpha, op.gamma())?;
        Ok(Self {
            op,
            alpha,
            a,
            u,
            shifted,
            smw,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// One undamped sweep `T_α x + d`; with `b = 0` this applies `T_α`.
    pub fn step(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        let n = x.len();
        let gamma = self.op.gamma();
        let mut t = vec![0.0; self.u.ncols()];
        let mut uut = vec![0.0; n];
        self.u.mul_transpose_into(x, &mut t);
        self.u.mul_into(&t, &mut uut);
        let mut half: Vec<f64> = (0..n)
            .map(|i| self.alpha * x[i] - gamma * uut[i] + b[i])
            .collect();
        self.shifted.solve_in_place(&mut half);

        let mut ax = vec![0.0; n];
        self.a.mul_into(&half, &mut ax);
        let rhs: Vec<f64> = (0..n)
            .map(|i| self.alpha * half[i] - ax[i] + b[i])
            .collect();
        let mut next = vec![0.0; n];
        self.smw.apply_into(&rhs, &mut next);
        next
    }

    /// Iterates `x ← (1−β)x + β(T_α x + d)` until the true relative residual
    /// falls below `tol` or `maxit` sweeps are done.
    pub fn solve(&self, b: &[f64], opts: &SolveOptions) -> Result<(Vec<f64>, SolveReport)> {
        self.solve_observed(b, opts, |_, _| {})
    }

    /// As [`solve`](Self::solve), calling `observe(k, xᵏ)` after every sweep.
    pub fn solve_observed(
        &self,
        b: &[f64],
        opts: &SolveOptions,
        mut observe: impl FnMut(usize, &[f64]),
    ) -> Result<(Vec<f64>, SolveReport)> {
        let start = Instant::now();
        let n = self.op.dim();
        check_dim("stationary rhs", n, b.len())?;
        opts.validate(n)?;
        ensure_finite(b, "right-hand side")?;

        let bnorm = norm(b);
        let mut x = opts.initial_guess(n);
        let mut report = SolveReport {
            converged: false,
            iterations: 0,
            residual_history: Vec::new(),
            relres: 0.0,
            setup_seconds: 0.0,
            solve_seconds: 0.0,
        };
        if bnorm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            report.converged = true;
            return Ok((x, report));
        }
        let mut r = vec![0.0; n];
        residual(self.op, b, &x, &mut r);
        ensure_finite(&r, "stationary initial residual")?;
        let mut relres = norm(&r) / bnorm;
        while relres >= opts.tol && report.iterations < opts.maxit {
            let full = self.step(&x, b);
            for (xi, fi) in x.iter_mut().zip(&full) {
                *xi = (1.0 - opts.beta) * *xi + opts.beta * fi;
            }
            ensure_finite(&x, "stationary iterate")?;
            report.iterations += 1;
            observe(report.iterations, &x);
            residual(self.op, b, &x, &mut r);
            relres = norm(&r) / bnorm;
            report.residual_history.push(relres);
        }
        report.relres = relres;
        report.converged = relres < opts.tol;
        report.solve_seconds = start.elapsed().as_secs_f64();
        Ok((x, report))
    }
}

/// Builds the iteration for `alpha` and runs it on `b`.
pub fn stationary_alternating(
    op: &LowRankUpdatedOperator,
    b: &[f64],
    alpha: f64,
    opts: &SolveOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let setup = Instant::now();
    let it = StationaryIteration::new(op, alpha)?;
    let setup_seconds = setup.elapsed().as_secs_f64();
    let (x, mut rep) = it.solve(b, opts)?;
    rep.setup_seconds = setup_seconds;
    Ok((x, rep))
}
