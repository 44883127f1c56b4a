//! Run configuration: JSON file values overridden by command-line flags,
//! then resolved to concrete settings.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use lrsplit::precond::PrecondKind;
use lrsplit::problems::{ProblemSpec, Wind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Gmres,
    Pcg,
    Stationary,
}

/// Scalar multiple of the preconditioner used for reported spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarConvention {
    /// With the `1/(2α)` factor of the product and symmetrized forms.
    Conventional,
    /// The map as applied by the solvers.
    Applied,
}

/// Every setting, all optional; used for the config file and for flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialConfig {
    pub matrix_a: Option<PathBuf>,
    pub matrix_u: Option<PathBuf>,
    pub rhs: Option<PathBuf>,
    pub problem: Option<ProblemSpec>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub alpha_grid: Option<String>,
    pub method: Option<Method>,
    pub precond: Option<Vec<PrecondKind>>,
    pub tol: Option<f64>,
    pub maxit: Option<usize>,
    pub restart: Option<usize>,
    pub beta: Option<f64>,
    pub scale_diag: Option<bool>,
    pub normalize: Option<bool>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub no_timing: Option<bool>,
    pub spectrum_cap: Option<usize>,
    pub scalar: Option<ScalarConvention>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl PartialConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Values set in `top` replace those in `self`.
    pub fn overlay(mut self, top: PartialConfig) -> Self {
        if top.problem.is_some() || top.matrix_a.is_some() {
            // A new input source replaces the old one entirely.
            self.problem = None;
            self.matrix_a = None;
            self.matrix_u = None;
        }
        overlay!(
            self, top, matrix_a, matrix_u, rhs, problem, gamma, alpha, alpha_grid, method, precond,
            tol, maxit, restart, beta, scale_diag, normalize, seed, out, no_timing, spectrum_cap,
            scalar
        );
        self
    }
}

/// Where the operator comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Files {
        matrix_a: PathBuf,
        matrix_u: PathBuf,
    },
    Problem(ProblemSpec),
}

/// Log-spaced α values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// Grid points per decade when a grid gives only `min:max`.
pub const POINTS_PER_DECADE: f64 = 25.0;

impl std::fmt::Display for AlphaGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:e}:{:e}:{}", self.min, self.max, self.points)
    }
}

impl AlphaGrid {
    /// Parses `min:max:points` or `min:max`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 2 && parts.len() != 3 {
            bail!("alpha grid must be min:max[:points], got '{s}'");
        }
        let num = |p: &str| -> Result<f64> {
            p.trim().parse::<f64>().map_err(|_| anyhow!("bad number '{p}' in alpha grid"))
        };
        let (min, max) = (num(parts[0])?, num(parts[1])?);
        if !(min > 0.0 && max >= min && max.is_finite()) {
            bail!("alpha grid needs 0 < min <= max, got '{s}'");
        }
        let points = match parts.get(2) {
            Some(p) => p.trim().parse::<usize>().map_err(|_| anyhow!("bad point count '{p}'"))?,
            // Guard against `log10` landing a hair above an integer.
            None => ((max / min).log10() * POINTS_PER_DECADE - 1e-9).ceil().max(0.0) as usize + 1,
        };
        if points == 0 {
            bail!("alpha grid needs at least one point");
        }
        Ok(Self { min, max, points })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let (lo, hi) = (self.min.ln(), self.max.ln());
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    self.min
                } else if i + 1 == self.points {
                    self.max
                } else {
                    (lo + (hi - lo) * i as f64 / (self.points - 1) as f64).exp()
                }
            })
            .collect()
    }
}

/// The effective configuration, embedded in every output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Input,
    pub rhs: Option<PathBuf>,
    pub gamma: f64,
    /// Single α; `√γ` of the (normalized) problem when not given.
    pub alpha: Option<f64>,
    pub alpha_grid: Option<AlphaGrid>,
    pub method: Method,
    pub precond: Vec<PrecondKind>,
    pub tol: f64,
    pub maxit: usize,
    pub restart: usize,
    pub beta: f64,
    pub scale_diag: bool,
    pub normalize: bool,
    pub out: Option<PathBuf>,
    pub no_timing: bool,
    pub spectrum_cap: usize,
    pub scalar: ScalarConvention,
}

pub const DEFAULT_GAMMA: f64 = 1.0;
pub const DEFAULT_GRID: &str = "1e-3:1e1";
pub const DEFAULT_SEED: u64 = 1;

impl RunConfig {
    pub fn resolve(p: PartialConfig) -> Result<Self> {
        let input = match (p.problem, p.matrix_a, p.matrix_u) {
            (Some(spec), None, None) => Input::Problem(with_seed(spec, p.seed)),
            (None, Some(a), Some(u)) => Input::Files {
                matrix_a: a,
                matrix_u: u,
            },
            (None, Some(_), None) | (None, None, Some(_)) => {
                bail!("--matrix-a and --matrix-u must be given together")
            }
            (None, None, None) => bail!("no input: give --matrix-a/--matrix-u or --problem"),
            _ => bail!("give either matrix files or a generated problem, not both"),
        };
        let gamma = p.gamma.unwrap_or(DEFAULT_GAMMA);
        if !(gamma > 0.0) {
            bail!("gamma must be positive, got {gamma}");
        }
        if let Some(a) = p.alpha {
            if !(a > 0.0) {
                bail!("alpha must be positive, got {a}");
            }
        }
        let alpha_grid = p.alpha_grid.as_deref().map(AlphaGrid::parse).transpose()?;
        let tol = p.tol.unwrap_or(1e-6);
        if !(tol > 0.0) {
            bail!("tol must be positive, got {tol}");
        }
        let restart = p.restart.unwrap_or(20);
        if restart == 0 {
            bail!("restart must be at least 1");
        }
        let beta = p.beta.unwrap_or(1.0);
        if !(beta > 0.0 && beta <= 1.0) {
            bail!("beta must lie in (0, 1], got {beta}");
        }
        let precond = p.precond.unwrap_or_else(|| vec![PrecondKind::Product]);
        if precond.is_empty() {
            bail!("at least one preconditioner is required");
        }
        let method = p.method.unwrap_or(Method::Gmres);
        if method == Method::Stationary && precond != [PrecondKind::Product] {
            bail!("the stationary iteration is tied to the product splitting; use --precond product");
        }
        Ok(Self {
            input,
            rhs: p.rhs,
            gamma,
            alpha: p.alpha,
            alpha_grid,
            method,
            precond,
            tol,
            maxit: p.maxit.unwrap_or(2000),
            restart,
            beta,
            scale_diag: p.scale_diag.unwrap_or(false),
            normalize: p.normalize.unwrap_or(false),
            out: p.out,
            no_timing: p.no_timing.unwrap_or(false),
            spectrum_cap: p.spectrum_cap.unwrap_or(lrsplit::spectra::GENERAL_EIG_CAP),
            scalar: p.scalar.unwrap_or(ScalarConvention::Conventional),
        })
    }

    /// The configuration in the config-file format, every field explicit.
    pub fn to_partial(&self) -> PartialConfig {
        let (matrix_a, matrix_u, problem) = match &self.input {
            Input::Files { matrix_a, matrix_u } => {
                (Some(matrix_a.clone()), Some(matrix_u.clone()), None)
            }
            Input::Problem(spec) => (None, None, Some(spec.clone())),
        };
        PartialConfig {
            matrix_a,
            matrix_u,
            rhs: self.rhs.clone(),
            problem,
            gamma: Some(self.gamma),
            alpha: self.alpha,
            alpha_grid: self.alpha_grid.map(|g| g.to_string()),
            method: Some(self.method),
            precond: Some(self.precond.clone()),
            tol: Some(self.tol),
            maxit: Some(self.maxit),
            restart: Some(self.restart),
            beta: Some(self.beta),
            scale_diag: Some(self.scale_diag),
            normalize: Some(self.normalize),
            seed: None,
            out: self.out.clone(),
            no_timing: Some(self.no_timing),
            spectrum_cap: Some(self.spectrum_cap),
            scalar: Some(self.scalar),
        }
    }

    /// One-line JSON that `--config` accepts back.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_partial()).expect("config serializes")
    }
}

fn with_seed(spec: ProblemSpec, seed: Option<u64>) -> ProblemSpec {
    let Some(s) = seed else { return spec };
    match spec {
        ProblemSpec::RandomSpdLowrank { n, k, cond, .. } => ProblemSpec::RandomSpdLowrank {
            n,
            k,
            cond,
            seed: s,
        },
        ProblemSpec::KktSchur { n, k, .. } => ProblemSpec::KktSchur { n, k, seed: s },
        ProblemSpec::SparseDenseLs {
            m1,
            k,
            n,
            density,
            rank_deficient,
            ..
        } => ProblemSpec::SparseDenseLs {
            m1,
            k,
            n,
            density,
            rank_deficient,
            seed: s,
        },
        other => other,
    }
}

/// Problem-family flags gathered from the command line.
#[derive(Debug, Clone, Default)]
pub struct ProblemFlags {
    pub kind: Option<String>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub nu: Option<f64>,
    pub wind: Option<Wind>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub cond: Option<f64>,
    pub m1: Option<usize>,
    pub density: Option<f64>,
    pub rank_deficient: bool,
    pub seed: Option<u64>,
}

impl ProblemFlags {
    pub fn to_spec(&self) -> Result<Option<ProblemSpec>> {
        let Some(kind) = self.kind.as_deref() else {
            return Ok(None);
        };
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| anyhow!("--problem {kind} needs --{name}"))
        };
        let seed = self.seed.unwrap_or(DEFAULT_SEED);
        let spec = match kind {
            "stokes-mac" => ProblemSpec::StokesMac {
                nx: need(self.nx, "nx")?,
                ny: need(self.ny.or(self.nx), "ny")?,
            },
            "oseen-mac" => ProblemSpec::OseenMac {
                nx: need(self.nx, "nx")?,
                ny: need(self.ny.or(self.nx), "ny")?,
                nu: self.nu.unwrap_or(0.01),
                wind: self.wind.unwrap_or_default(),
            },
            "random-spd-lowrank" => ProblemSpec::RandomSpdLowrank {
                n: need(self.n, "n")?,
                k: need(self.k, "k")?,
                cond: self.cond.unwrap_or(100.0),
                seed,
            },
            "kkt-schur" => ProblemSpec::KktSchur {
                n: need(self.n, "n")?,
                k: need(self.k, "k")?,
                seed,
            },
            "sparse-dense-ls" => ProblemSpec::SparseDenseLs {
                m1: need(self.m1, "m1")?,
                k: need(self.k, "k")?,
                n: need(self.n, "n")?,
                density: self.density.unwrap_or(0.1),
                rank_deficient: self.rank_deficient,
                seed,
            },
            other => bail!(
                "unknown problem '{other}' (expected stokes-mac, oseen-mac, random-spd-lowrank, \
                 kkt-schur or sparse-dense-ls)"
            ),
        };
        Ok(Some(spec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = AlphaGrid::parse("1e-2:1e2:5").unwrap();
        let v = g.values();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 1e-2);
        assert_eq!(v[4], 1e2);
        assert!((v[2] - 1.0).abs() < 1e-12);
        assert_eq!(AlphaGrid::parse("0.1:10").unwrap().points, 51);
        assert!(AlphaGrid::parse("0:1:3").is_err());
        assert!(AlphaGrid::parse("1:2:0").is_err());
        assert!(AlphaGrid::parse("2:1").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: PartialConfig =
            serde_json::from_str(r#"{"gamma": 5.0, "tol": 1e-8, "precond": ["shift-only"]}"#)
                .unwrap();
        let flags = PartialConfig {
            gamma: Some(2.0),
            problem: Some(ProblemSpec::StokesMac { nx: 3, ny: 3 }),
            ..Default::default()
        };
        let c = RunConfig::resolve(file.overlay(flags)).unwrap();
        assert_eq!(c.gamma, 2.0);
        assert_eq!(c.tol, 1e-8);
        assert_eq!(c.precond, vec![PrecondKind::ShiftOnly]);
    }

    #[test]
    fn echo_round_trips() {
        let p = PartialConfig {
            problem: Some(ProblemSpec::OseenMac {
                nx: 4,
                ny: 5,
                nu: 0.1,
                wind: Wind::RecirculatingVortex,
            }),
            alpha_grid: Some("0.003:7.5:9".into()),
            tol: Some(1e-9),
            ..Default::default()
        };
        let c = RunConfig::resolve(p).unwrap();
        let back: PartialConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(RunConfig::resolve(back).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<PartialConfig>(r#"{"gama": 1}"#).is_err());
    }

    #[test]
    fn input_must_be_unique() {
        let p = PartialConfig {
            matrix_a: Some("a.mtx".into()),
            ..Default::default()
        };
        assert!(RunConfig::resolve(p).is_err());
        assert!(RunConfig::resolve(PartialConfig::default()).is_err());
    }

    #[test]
    fn seed_flag_reaches_random_problems() {
        let p = PartialConfig {
            problem: Some(ProblemSpec::KktSchur { n: 9, k: 2, seed: 4 }),
            seed: Some(11),
            ..Default::default()
        };
        let c = RunConfig::resolve(p).unwrap();
        assert_eq!(c.input, Input::Problem(ProblemSpec::KktSchur { n: 9, k: 2, seed: 11 }));
    }
}
