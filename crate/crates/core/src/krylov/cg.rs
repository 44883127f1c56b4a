use std::time::Instant;

use crate::error::{check_dim, Error, Result};
use crate::krylov::{axpy, dot, ensure_finite, norm, residual, SolveOptions, SolveReport};
use crate::operator::LinearOperator;
use crate::precond::Preconditioner;

/// Preconditioned conjugate gradients for SPD `A` and SPD `P`.
///
/// The recursive residual drives the iteration; whenever it drops below `tol`
/// the true residual is recomputed and must confirm convergence.
pub fn pcg<O, P>(op: &O, b: &[f64], p: &P, opts: &SolveOptions) -> Result<(Vec<f64>, SolveReport)>
where
    O: LinearOperator + ?Sized,
    P: Preconditioner + ?Sized,
{
    let start = Instant::now();
    let n = op.dim();
    check_dim("pcg rhs", n, b.len())?;
    check_dim("pcg preconditioner", n, p.dim())?;
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
    residual(op, b, &x, &mut r);
    ensure_finite(&r, "CG initial residual")?;
    let mut relres = norm(&r) / bnorm;
    let mut z = vec![0.0; n];
    p.apply_into(&r, &mut z);
    let mut rz = dot(&r, &z);
    let mut d = z.clone();
    let mut q = vec![0.0; n];

    while relres >= opts.tol && report.iterations < opts.maxit {
        op.apply_into(&d, &mut q);
        let dq = dot(&d, &q);
        if !dq.is_finite() {
            return Err(Error::Breakdown("non-finite values in CG".into()));
        }
        if dq <= 0.0 {
            return Err(Error::Breakdown(format!(
                "operator not SPD: pᵀAp = {dq:e} at iteration {}",
                report.iterations + 1
            )));
        }
        let step = rz / dq;
        axpy(step, &d, &mut x);
        axpy(-step, &q, &mut r);
        report.iterations += 1;
        relres = norm(&r) / bnorm;
        if relres < opts.tol {
            residual(op, b, &x, &mut r);
            relres = norm(&r) / bnorm;
        }
        report.residual_history.push(relres);
        if relres < opts.tol {
            break;
        }

        p.apply_into(&r, &mut z);
        let rz_new = dot(&r, &z);
        if !(rz_new > 0.0) {
            return Err(Error::Breakdown(format!(
                "preconditioner not SPD: rᵀP⁻¹r = {rz_new:e}"
            )));
        }
        let ratio = rz_new / rz;
        rz = rz_new;
        for (di, zi) in d.iter_mut().zip(&z) {
            *di = zi + ratio * *di;
        }
    }

    residual(op, b, &x, &mut r);
    report.relres = norm(&r) / bnorm;
    report.converged = report.relres < opts.tol;
    report.solve_seconds = start.elapsed().as_secs_f64();
    Ok((x, report))
}
