use std::time::Instant;

use crate::error::{check_dim, Error, Result};
use crate::krylov::{axpy, dot, ensure_finite, norm, residual, SolveOptions, SolveReport};
use crate::operator::LinearOperator;
use crate::precond::Preconditioner;

/// Restarted GMRES(m) on `Ax = b` with right preconditioning, `A P⁻¹ y = b`,
/// `x = P⁻¹y`. Arnoldi uses modified Gram–Schmidt; the least-squares problem
/// is updated with Givens rotations.
///
/// Hitting `maxit` is not an error: the report has `converged = false` and the
/// iterate with the smallest true residual is returned.
pub fn gmres_right<O, P>(
    op: &O,
    b: &[f64],
    p: &P,
    opts: &SolveOptions,
) -> Result<(Vec<f64>, SolveReport)>
where
    O: LinearOperator + ?Sized,
    P: Preconditioner + ?Sized,
{
    let start = Instant::now();
    let n = op.dim();
    check_dim("gmres rhs", n, b.len())?;
    check_dim("gmres preconditioner", n, p.dim())?;
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

    let m = opts.restart.min(n).max(1);
    let mut r = vec![0.0; n];
    residual(op, b, &x, &mut r);
    ensure_finite(&r, "GMRES initial residual")?;
    let mut beta = norm(&r);
    let mut relres = beta / bnorm;
    let mut best = (relres, x.clone());

    let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut h = vec![vec![0.0; m]; m + 1];
    let mut cs = vec![0.0; m];
    let mut sn = vec![0.0; m];
    let mut g = vec![0.0; m + 1];
    let mut w = vec![0.0; n];

    while relres >= opts.tol && report.iterations < opts.maxit {
        v.clear();
        z.clear();
        v.push(r.iter().map(|ri| ri / beta).collect());
        g.iter_mut().for_each(|gi| *gi = 0.0);
        g[0] = beta;

        let mut steps = 0;
        for j in 0..m {
            if report.iterations >= opts.maxit {
                break;
            }
            let mut zj = vec![0.0; n];
            p.apply_into(&v[j], &mut zj);
            op.apply_into(&zj, &mut w);
            ensure_finite(&w, "GMRES Arnoldi vector")?;
            z.push(zj);

            let w_norm0 = norm(&w);
            for i in 0..=j {
                let hij = dot(&w, &v[i]);
                h[i][j] = hij;
                axpy(-hij, &v[i], &mut w);
            }
            let h_next = norm(&w);

            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = h[j][j].hypot(h_next);
            if denom == 0.0 {
                return Err(Error::Breakdown("GMRES: singular Hessenberg column".into()));
            }
            cs[j] = h[j][j] / denom;
            sn[j] = h_next / denom;
            h[j][j] = denom;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];

            steps = j + 1;
            report.iterations += 1;
            let estimate = g[j + 1].abs() / bnorm;
            report.residual_history.push(estimate);

            let happy = h_next <= 1e-14 * w_norm0;
            if happy || estimate < opts.tol {
                break;
            }
            v.push(w.iter().map(|wi| wi / h_next).collect());
        }

        // Back substitution for the cycle's coefficients.
        let mut y = g[..steps].to_vec();
        for i in (0..steps).rev() {
            for k in i + 1..steps {
                y[i] -= h[i][k] * y[k];
            }
            y[i] /= h[i][i];
        }
        for (zi, yi) in z.iter().zip(&y) {
            axpy(*yi, zi, &mut x);
        }
        ensure_finite(&x, "GMRES iterate")?;

        residual(op, b, &x, &mut r);
        beta = norm(&r);
        relres = beta / bnorm;
        if let Some(last) = report.residual_history.last_mut() {
            *last = relres;
        }
        if relres < best.0 {
            best = (relres, x.clone());
        }
        if beta == 0.0 {
            break;
        }
    }

    report.converged = relres < opts.tol;
    let x = if report.converged { x } else { best.1 };
    report.relres = if report.converged { relres } else { best.0 };
    report.solve_seconds = start.elapsed().as_secs_f64();
    Ok((x, report))
}
