//! `lrsplit`: solves, α-sweeps, bound reports and spectra for `A + γUUᵀ`.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use lrsplit::precond::PrecondKind;
use lrsplit::problems::Wind;

use crate::config::{Method, PartialConfig, ProblemFlags, RunConfig, ScalarConvention};

#[derive(Parser)]
#[command(name = "lrsplit", version, about = "Alternating-splitting preconditioners for A + γUUᵀ")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one system and write the solution and a JSON report.
    Solve(Flags),
    /// Solve over a grid of α values and preconditioners; CSV output.
    Sweep(Flags),
    /// Report the eigenvalue bounds (normalizes by default).
    Bounds(Flags),
    /// Write the eigenvalues of the preconditioned matrix as CSV.
    Spectrum(Flags),
    /// Write a generated problem as Matrix Market files plus a JSON sidecar.
    Gen(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// JSON configuration file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Matrix Market file holding A.
    #[arg(long)]
    matrix_a: Option<PathBuf>,
    /// Matrix Market file holding U (n×k).
    #[arg(long)]
    matrix_u: Option<PathBuf>,
    /// Right-hand side vector; defaults to A_γ·1 or the generator's own.
    #[arg(long)]
    rhs: Option<PathBuf>,
    /// Generated problem: stokes-mac, oseen-mac, random-spd-lowrank, kkt-schur, sparse-dense-ls.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// Viscosity of oseen-mac.
    #[arg(long)]
    nu: Option<f64>,
    /// Wind of oseen-mac: recirculating-vortex or none.
    #[arg(long, value_parser = parse_wind)]
    wind: Option<Wind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    cond: Option<f64>,
    #[arg(long)]
    m1: Option<usize>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    rank_deficient: bool,
    #[arg(long)]
    gamma: Option<f64>,
    /// Defaults to √γ of the system being solved.
    #[arg(long)]
    alpha: Option<f64>,
    /// Log-spaced grid `min:max[:points]`.
    #[arg(long)]
    alpha_grid: Option<String>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Comma-separated preconditioner kinds.
    #[arg(long, value_delimiter = ',', value_parser = parse_precond)]
    precond: Option<Vec<PrecondKind>>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    maxit: Option<usize>,
    #[arg(long)]
    restart: Option<usize>,
    /// Damping of the stationary iteration.
    #[arg(long)]
    beta: Option<f64>,
    /// Scale the system to unit diagonal.
    #[arg(long)]
    scale_diag: bool,
    /// Rescale to ‖A‖₂ = ‖U‖₂ = 1.
    #[arg(long)]
    normalize: bool,
    /// Skip normalization (bounds normalizes by default).
    #[arg(long, conflicts_with = "normalize")]
    no_normalize: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (directory for gen).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Write zero timings so outputs are reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
    /// Largest n for which dense spectra are computed.
    #[arg(long)]
    spectrum_cap: Option<usize>,
    /// Scalar multiple of the preconditioner for spectra.
    #[arg(long, value_enum)]
    scalar: Option<ScalarConvention>,
}

fn parse_precond(s: &str) -> Result<PrecondKind, String> {
    s.trim().parse().map_err(|e: lrsplit::Error| e.to_string())
}

fn parse_wind(s: &str) -> Result<Wind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown wind '{s}' (expected recirculating-vortex or none)"))
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

impl Flags {
    fn into_config(self, normalize_default: bool, grid_default: bool) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => PartialConfig::load(path)?,
            None => PartialConfig::default(),
        };
        let problem = ProblemFlags {
            kind: self.problem,
            nx: self.nx,
            ny: self.ny,
            nu: self.nu,
            wind: self.wind,
            n: self.n,
            k: self.k,
            cond: self.cond,
            m1: self.m1,
            density: self.density,
            rank_deficient: self.rank_deficient,
            seed: self.seed,
        }
        .to_spec()?;
        let normalize = if self.no_normalize {
            Some(false)
        } else {
            flag(self.normalize)
        };
        let top = PartialConfig {
            matrix_a: self.matrix_a,
            matrix_u: self.matrix_u,
            rhs: self.rhs,
            problem,
            gamma: self.gamma,
            alpha: self.alpha,
            alpha_grid: self.alpha_grid,
            method: self.method,
            precond: self.precond,
            tol: self.tol,
            maxit: self.maxit,
            restart: self.restart,
            beta: self.beta,
            scale_diag: flag(self.scale_diag),
            normalize,
            seed: self.seed,
            out: self.out,
            no_timing: flag(self.no_timing),
            spectrum_cap: self.spectrum_cap,
            scalar: self.scalar,
        };
        let mut merged = base.overlay(top);
        if merged.normalize.is_none() {
            merged.normalize = Some(normalize_default);
        }
        if grid_default && merged.alpha.is_none() && merged.alpha_grid.is_none() {
            merged.alpha_grid = Some(config::DEFAULT_GRID.to_string());
        }
        RunConfig::resolve(merged)
    }
}

/// 1 for bad input or configuration, 2 for numerical failure.
fn error_code(err: &anyhow::Error) -> u8 {
    use lrsplit::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::NotPositiveDefinite { .. }
                | E::ZeroPivot { .. }
                | E::Breakdown(_)
                | E::NoConvergence(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve(f) => commands::solve(&f.into_config(false, false)?),
        Command::Sweep(f) => commands::sweep(&f.into_config(false, true)?),
        Command::Bounds(f) => commands::bounds(&f.into_config(true, false)?),
        Command::Spectrum(f) => commands::spectrum(&f.into_config(false, false)?),
        Command::Gen(f) => commands::gen(&f.into_config(false, false)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
