//! The five subcommands. Each takes a resolved configuration and returns the
//! process exit status on success.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use lrsplit::krylov::{gmres_right, pcg, stationary_alternating, SolveOptions, SolveReport};
use lrsplit::operator::{LinearOperator, LowRankUpdatedOperator, NormalizationRecord};
use lrsplit::precond::{self, build_symmetrized, Mode, PrecondKind};
use lrsplit::problems::ProblemSpec;
use lrsplit::sparse::{mm_read, mm_write, read_vector, write_vector, MmMatrix, TallMatrix};
use lrsplit::spectra::{
    bounds_report, preconditioned_spectrum, symmetrized_spectrum, Scaling, Spectrum,
};
use serde::Serialize;

use crate::config::{Input, Method, PartialConfig, RunConfig, ScalarConvention};

/// Exit status of a solve that ran but missed the tolerance.
pub const EXIT_NOT_CONVERGED: u8 = 3;

/// Relative tolerance of the power iterations behind `--normalize`.
const NORMALIZE_TOL: f64 = 1e-8;

/// The system handed to the solvers, plus what is needed to map back.
pub struct Prepared {
    /// Operator as loaded or generated.
    pub original: LowRankUpdatedOperator,
    pub b_original: Vec<f64>,
    /// Normalized and/or diagonally scaled operator the solvers see.
    pub op: LowRankUpdatedOperator,
    pub b: Vec<f64>,
    pub normalization: Option<NormalizationRecord>,
}

impl Prepared {
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        let (original, generated_rhs) = match &cfg.input {
            Input::Files { matrix_a, matrix_u } => {
                let a = mm_read(matrix_a)
                    .with_context(|| format!("reading {}", matrix_a.display()))?
                    .into_csr();
                let u = match mm_read(matrix_u)
                    .with_context(|| format!("reading {}", matrix_u.display()))?
                {
                    MmMatrix::Sparse(s) => TallMatrix::Sparse(s),
                    MmMatrix::Dense(d) => TallMatrix::Dense(d),
                };
                (LowRankUpdatedOperator::new(a, u, cfg.gamma)?, None)
            }
            Input::Problem(spec) => {
                let p = spec.build(cfg.gamma)?;
                (p.op, p.rhs)
            }
        };
        let b_original = match &cfg.rhs {
            Some(path) => {
                read_vector(path).with_context(|| format!("reading {}", path.display()))?
            }
            None => match generated_rhs {
                Some(b) => b,
                None => original.apply(&vec![1.0; original.n()])?,
            },
        };
        if b_original.len() != original.n() {
            bail!(
                "right-hand side has length {}, operator has dimension {}",
                b_original.len(),
                original.n()
            );
        }

        let mut op = original.clone();
        let mut b = b_original.clone();
        let mut normalization = None;
        if cfg.normalize {
            let (nop, rec) = op.normalize(NORMALIZE_TOL)?;
            b.iter_mut().for_each(|v| *v /= rec.norm_a);
            op = nop;
            normalization = Some(rec);
        }
        if cfg.scale_diag {
            op = op.with_diagonal_scaling()?;
            let s = op.scaling().expect("scaling was just set");
            b.iter_mut().zip(s).for_each(|(v, s)| *v /= s);
        }
        Ok(Self {
            original,
            b_original,
            op,
            b,
            normalization,
        })
    }

    /// α used when none is configured: `√γ` of the system being solved.
    pub fn default_alpha(&self) -> f64 {
        self.op.gamma().sqrt()
    }

    /// Maps a solution of the scaled system back to the original unknowns.
    pub fn unscale(&self, mut y: Vec<f64>) -> Vec<f64> {
        if let Some(s) = self.op.scaling() {
            y.iter_mut().zip(s).for_each(|(v, s)| *v /= s);
        }
        y
    }

    /// `‖b − A_γx‖/‖b‖` on the original system.
    pub fn original_relres(&self, x: &[f64]) -> Result<f64> {
        let ax = self.original.apply(x)?;
        let r: f64 = self
            .b_original
            .iter()
            .zip(&ax)
            .map(|(b, a)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt();
        let nb = self.b_original.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(if nb == 0.0 { r } else { r / nb })
    }
}

fn solve_options(cfg: &RunConfig) -> SolveOptions {
    SolveOptions {
        tol: cfg.tol,
        maxit: cfg.maxit,
        restart: cfg.restart,
        x0: None,
        beta: cfg.beta,
    }
}

/// One solve with the given preconditioner and α. Returns the solution of the
/// system in the solver's (scaled) unknowns.
pub fn run_cell(
    prep: &Prepared,
    cfg: &RunConfig,
    kind: PrecondKind,
    alpha: f64,
) -> Result<(Vec<f64>, SolveReport)> {
    let opts = solve_options(cfg);
    let (y, mut rep) = match cfg.method {
        Method::Stationary => stationary_alternating(&prep.op, &prep.b, alpha, &opts)?,
        Method::Gmres | Method::Pcg => {
            let start = Instant::now();
            let p = precond::build(kind, &prep.op, alpha)?;
            let setup = start.elapsed().as_secs_f64();
            let (y, mut rep) = match cfg.method {
                Method::Gmres => gmres_right(&prep.op, &prep.b, p.as_ref(), &opts)?,
                _ => pcg(&prep.op, &prep.b, p.as_ref(), &opts)?,
            };
            rep.setup_seconds = setup;
            (y, rep)
        }
    };
    if cfg.no_timing {
        rep.setup_seconds = 0.0;
        rep.solve_seconds = 0.0;
    }
    Ok((y, rep))
}

fn single_alpha(cfg: &RunConfig, prep: &Prepared) -> f64 {
    cfg.alpha.unwrap_or_else(|| prep.default_alpha())
}

fn alphas(cfg: &RunConfig, prep: &Prepared) -> Vec<f64> {
    match &cfg.alpha_grid {
        Some(g) => g.values(),
        None => vec![single_alpha(cfg, prep)],
    }
}

#[derive(Serialize)]
struct SystemInfo {
    n: usize,
    k: usize,
    /// `γ` of the system the solvers see (after normalization).
    gamma: f64,
    symmetric: bool,
    normalization: Option<NormalizationRecord>,
}

fn system_info(prep: &Prepared) -> SystemInfo {
    SystemInfo {
        n: prep.op.n(),
        k: prep.op.k(),
        gamma: prep.op.gamma(),
        symmetric: prep.op.is_symmetric(),
        normalization: prep.normalization,
    }
}

#[derive(Serialize)]
struct SolveOutput {
    config: PartialConfig,
    system: SystemInfo,
    alpha: f64,
    precond: PrecondKind,
    iterations: usize,
    converged: bool,
    /// Relative residual of the system passed to the solver.
    relres: f64,
    /// Relative residual of the original, unscaled system.
    relres_unscaled: f64,
    setup_seconds: f64,
    solve_seconds: f64,
    solution: Option<PathBuf>,
    residual_history: Vec<f64>,
}

fn report_path(solution: &Path) -> PathBuf {
    solution.with_extension("json")
}

pub fn solve(cfg: &RunConfig) -> Result<u8> {
    if cfg.alpha_grid.is_some() {
        bail!("solve takes a single --alpha; use sweep for a grid");
    }
    if cfg.precond.len() != 1 {
        bail!("solve takes exactly one preconditioner");
    }
    let prep = Prepared::load(cfg)?;
    let alpha = single_alpha(cfg, &prep);
    let kind = cfg.precond[0];
    let (y, rep) = run_cell(&prep, cfg, kind, alpha)?;
    let x = prep.unscale(y);
    let relres_unscaled = prep.original_relres(&x)?;

    if let Some(path) = &cfg.out {
        write_vector(&x, path).with_context(|| format!("writing {}", path.display()))?;
    }
    let out = SolveOutput {
        config: cfg.to_partial(),
        system: system_info(&prep),
        alpha,
        precond: kind,
        iterations: rep.iterations,
        converged: rep.converged,
        relres: rep.relres,
        relres_unscaled,
        setup_seconds: rep.setup_seconds,
        solve_seconds: rep.solve_seconds,
        solution: cfg.out.clone(),
        residual_history: rep.residual_history,
    };
    let json = serde_json::to_string_pretty(&out)? + "\n";
    match &cfg.out {
        Some(path) => {
            let rp = report_path(path);
            fs::write(&rp, json).with_context(|| format!("writing {}", rp.display()))?;
        }
        None => std::io::stdout().write_all(json.as_bytes())?,
    }
    Ok(if rep.converged { 0 } else { EXIT_NOT_CONVERGED })
}

/// One line of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub precond: PrecondKind,
    pub iterations: usize,
    pub converged: bool,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    pub relres: f64,
}

pub const SWEEP_HEADER: &str = "alpha,precond,iterations,converged,setup_s,solve_s,relres";

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{:.16e},{},{},{},{:.16e},{:.16e},{:.16e}",
            self.alpha,
            self.precond,
            self.iterations,
            self.converged,
            self.setup_seconds,
            self.solve_seconds,
            self.relres
        )
    }
}

/// Fewest iterations among converged rows, ties to the smaller α; if nothing
/// converged, the smallest residual.
pub fn argmin(rows: &[SweepRow], kind: PrecondKind) -> Option<&SweepRow> {
    let mine = rows.iter().filter(|r| r.precond == kind);
    let converged = mine.clone().filter(|r| r.converged).min_by(|a, b| {
        a.iterations
            .cmp(&b.iterations)
            .then(a.alpha.total_cmp(&b.alpha))
    });
    converged.or_else(|| {
        mine.min_by(|a, b| {
            let (ra, rb) = (nan_last(a.relres), nan_last(b.relres));
            ra.total_cmp(&rb).then(a.alpha.total_cmp(&b.alpha))
        })
    })
}

fn nan_last(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub fn sweep(cfg: &RunConfig) -> Result<u8> {
    let prep = Prepared::load(cfg)?;
    let grid = alphas(cfg, &prep);
    let mut rows = Vec::with_capacity(grid.len() * cfg.precond.len());
    for &alpha in &grid {
        for &kind in &cfg.precond {
            let row = match run_cell(&prep, cfg, kind, alpha) {
                Ok((_, rep)) => SweepRow {
                    alpha,
                    precond: kind,
                    iterations: rep.iterations,
                    converged: rep.converged,
                    setup_seconds: rep.setup_seconds,
                    solve_seconds: rep.solve_seconds,
                    relres: rep.relres,
                },
                Err(e) => {
                    eprintln!("alpha={alpha:e} precond={kind}: {e:#}");
                    SweepRow {
                        alpha,
                        precond: kind,
                        iterations: cfg.maxit,
                        converged: false,
                        setup_seconds: 0.0,
                        solve_seconds: 0.0,
                        relres: f64::NAN,
                    }
                }
            };
            rows.push(row);
        }
    }

    let mut csv = format!("# config {}\n{SWEEP_HEADER}\n", cfg.to_json());
    for r in &rows {
        csv.push_str(&r.to_csv());
        csv.push('\n');
    }
    let mut best = format!("{SWEEP_HEADER}\n");
    for &kind in &cfg.precond {
        if let Some(r) = argmin(&rows, kind) {
            best.push_str(&r.to_csv());
            best.push('\n');
        }
    }
    match &cfg.out {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
            print!("{best}");
        }
        None => {
            print!("{csv}");
            eprint!("argmin per preconditioner:\n{best}");
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct BoundsOutput {
    config: PartialConfig,
    system: SystemInfo,
    reports: Vec<lrsplit::spectra::BoundsReport>,
}

pub fn bounds(cfg: &RunConfig) -> Result<u8> {
    let prep = Prepared::load(cfg)?;
    let mut reports = Vec::new();
    for alpha in alphas(cfg, &prep) {
        reports.push(bounds_report(&prep.op, alpha, cfg.spectrum_cap)?);
    }
    let out = BoundsOutput {
        config: cfg.to_partial(),
        system: system_info(&prep),
        reports,
    };
    emit(cfg.out.as_deref(), &(serde_json::to_string_pretty(&out)? + "\n"))?;
    Ok(0)
}

pub fn spectrum(cfg: &RunConfig) -> Result<u8> {
    if cfg.precond.len() != 1 {
        bail!("spectrum takes exactly one preconditioner");
    }
    let prep = Prepared::load(cfg)?;
    let n = prep.op.n();
    if n > cfg.spectrum_cap {
        bail!(lrsplit::Error::SizeCap {
            n,
            cap: cfg.spectrum_cap
        });
    }
    let alpha = single_alpha(cfg, &prep);
    let scaling = match cfg.scalar {
        ScalarConvention::Conventional => Scaling::Conventional,
        ScalarConvention::Applied => Scaling::AsApplied,
    };
    let kind = cfg.precond[0];
    let s = match kind {
        PrecondKind::Symmetrized | PrecondKind::SymmetrizedInexact => {
            let mode = if kind == PrecondKind::Symmetrized {
                Mode::Exact
            } else {
                Mode::Inexact
            };
            let p = build_symmetrized(&prep.op, alpha, mode)?;
            Spectrum::from_real(&symmetrized_spectrum(&prep.op, &p, scaling)?)
        }
        _ => {
            let p = precond::build(kind, &prep.op, alpha)?;
            preconditioned_spectrum(&prep.op as &dyn LinearOperator, p.as_ref(), scaling)?
        }
    };
    let mut buf = format!("# config {}\n", cfg.to_json()).into_bytes();
    s.write_csv(&mut buf)?;
    emit(cfg.out.as_deref(), std::str::from_utf8(&buf)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct GenSidecar<'a> {
    problem: &'a ProblemSpec,
    gamma: f64,
    n: usize,
    k: usize,
    files: Vec<&'a str>,
}

pub fn gen(cfg: &RunConfig) -> Result<u8> {
    let Input::Problem(spec) = &cfg.input else {
        bail!("gen needs a generated problem (--problem or a config with \"problem\")");
    };
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let p = spec.build(cfg.gamma)?;
    mm_write(&MmMatrix::Sparse(p.op.a().clone()), dir.join("A.mtx"))?;
    let u = match p.op.u() {
        TallMatrix::Sparse(s) => MmMatrix::Sparse(s.clone()),
        TallMatrix::Dense(d) => MmMatrix::Dense(d.clone()),
    };
    mm_write(&u, dir.join("U.mtx"))?;
    let mut files = vec!["A.mtx", "U.mtx"];
    if let Some(b) = &p.rhs {
        write_vector(b, dir.join("b.mtx"))?;
        files.push("b.mtx");
    }
    let side = GenSidecar {
        problem: spec,
        gamma: p.op.gamma(),
        n: p.op.n(),
        k: p.op.k(),
        files,
    };
    fs::write(
        dir.join("problem.json"),
        serde_json::to_string_pretty(&side)? + "\n",
    )?;
    Ok(0)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}
