//! Seeded desk-scale test problems.
//!
//! Randomness comes from [`crate::rng`] (ChaCha8), so a [`ProblemSpec`]
//! determines its matrices bit for bit.

mod mac;
mod random;

pub use mac::{gen_oseen_mac, gen_stokes_mac, MacSystem, Wind};
pub use random::{
    gen_kkt_schur, gen_random_spd_lowrank, gen_sparse_dense_ls, KktData, LsData, SPD_BANDWIDTH,
    SPD_ROTATION_LAYERS,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::operator::{
    from_augmented_lagrangian, from_kkt_schur, from_normal_equations, LowRankUpdatedOperator,
};

fn default_nu() -> f64 {
    0.01
}

fn default_cond() -> f64 {
    100.0
}

/// A generated family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// Augmented Lagrangian block of a MAC Stokes problem.
    StokesMac { nx: usize, ny: usize },
    /// Augmented Lagrangian block of a MAC Oseen problem.
    OseenMac {
        nx: usize,
        ny: usize,
        #[serde(default = "default_nu")]
        nu: f64,
        #[serde(default)]
        wind: Wind,
    },
    /// Banded SPD `A` with prescribed condition number and Gaussian `U`.
    RandomSpdLowrank {
        n: usize,
        k: usize,
        #[serde(default = "default_cond")]
        cond: f64,
        seed: u64,
    },
    /// `H + CᵀZ⁻¹ΛC` (γ fixed to 1).
    KktSchur { n: usize, k: usize, seed: u64 },
    /// Normal equations `B₁ᵀB₁ + B₂ᵀB₂` (γ fixed to 1).
    SparseDenseLs {
        m1: usize,
        k: usize,
        n: usize,
        density: f64,
        #[serde(default)]
        rank_deficient: bool,
        seed: u64,
    },
}

/// An operator together with the right-hand side its family defines, if any.
#[derive(Debug, Clone)]
pub struct Problem {
    pub op: LowRankUpdatedOperator,
    pub rhs: Option<Vec<f64>>,
}

impl ProblemSpec {
    /// Whether the family fixes `γ = 1` itself.
    pub fn fixes_gamma(&self) -> bool {
        matches!(
            self,
            ProblemSpec::KktSchur { .. } | ProblemSpec::SparseDenseLs { .. }
        )
    }

    /// Builds the operator; `gamma` is ignored by families that fix it.
    pub fn build(&self, gamma: f64) -> Result<Problem> {
        Ok(match *self {
            ProblemSpec::StokesMac { nx, ny } => {
                let s = gen_stokes_mac(nx, ny)?;
                Problem {
                    op: from_augmented_lagrangian(s.a, &s.b, &s.w, gamma)?,
                    rhs: None,
                }
            }
            ProblemSpec::OseenMac { nx, ny, nu, wind } => {
                let s = gen_oseen_mac(nx, ny, nu, wind)?;
                Problem {
                    op: from_augmented_lagrangian(s.a, &s.b, &s.w, gamma)?,
                    rhs: None,
                }
            }
            ProblemSpec::RandomSpdLowrank { n, k, cond, seed } => {
                let (a, u) = gen_random_spd_lowrank(n, k, cond, seed)?;
                Problem {
                    op: LowRankUpdatedOperator::new(a, u, gamma)?,
                    rhs: None,
                }
            }
            ProblemSpec::KktSchur { n, k, seed } => {
                let d = gen_kkt_schur(n, k, seed)?;
                Problem {
                    op: from_kkt_schur(d.h, &d.c, &d.z, &d.lambda)?,
                    rhs: None,
                }
            }
            ProblemSpec::SparseDenseLs {
                m1,
                k,
                n,
                density,
                rank_deficient,
                seed,
            } => {
                let d = gen_sparse_dense_ls(m1, k, n, density, rank_deficient, seed)?;
                let (op, rhs) = from_normal_equations(&d.b1, &d.b2)?;
                let b = rhs.build(&d.c)?;
                Problem { op, rhs: Some(b) }
            }
        })
    }
}
