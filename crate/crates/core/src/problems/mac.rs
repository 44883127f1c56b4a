//! Staggered (MAC) finite-volume discretizations on the unit square.
//!
//! Velocities live on interior cell faces: `u` on vertical faces, `v` on
//! horizontal ones; pressures live in the `nx·ny` cells. Every equation is
//! integrated over its control volume, so `A` has O(ν) entries, `B` holds
//! face lengths and `W` cell areas, the same scaling a finite element
//! discretization produces. The cavity walls carry homogeneous Dirichlet
//! conditions; a wall half a cell away is imposed by reflection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Convecting field of the Oseen problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Wind {
    /// `(2Y(1−X²), −2X(1−Y²))` with `X = 2x−1`, `Y = 2y−1`.
    #[default]
    RecirculatingVortex,
    None,
}

impl Wind {
    /// Stream function: `u = ∂ψ/∂y`, `v = −∂ψ/∂x`.
    fn psi(self, x: f64, y: f64) -> f64 {
        match self {
            Wind::RecirculatingVortex => {
                let (xx, yy) = (2.0 * x - 1.0, 2.0 * y - 1.0);
                -0.5 * (1.0 - xx * xx) * (1.0 - yy * yy)
            }
            Wind::None => 0.0,
        }
    }

    /// Flux in +x through the vertical segment `x, [y0, y1]`.
    fn flux_x(self, x: f64, y0: f64, y1: f64) -> f64 {
        self.psi(x, y1) - self.psi(x, y0)
    }

    /// Flux in +y through the horizontal segment `[x0, x1], y`.
    fn flux_y(self, x0: f64, x1: f64, y: f64) -> f64 {
        self.psi(x0, y) - self.psi(x1, y)
    }
}

/// A MAC discretization: `A` (n×n), `B` (k×n) and the diagonal of `W`.
#[derive(Debug, Clone)]
pub struct MacSystem {
    pub a: CsrMatrix,
    pub b: CsrMatrix,
    pub w: Vec<f64>,
}

struct Grid {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
}

impl Grid {
    fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidInput(format!(
                "MAC grid needs nx, ny >= 3, got {nx}x{ny}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            hx: 1.0 / nx as f64,
            hy: 1.0 / ny as f64,
        })
    }

    fn n_u(&self) -> usize {
        (self.nx - 1) * self.ny
    }

    fn n(&self) -> usize {
        self.n_u() + self.nx * (self.ny - 1)
    }

    /// `u` on the face `x = i·hx`, cell row `j` (1 ≤ i ≤ nx−1).
    fn u(&self, i: usize, j: usize) -> Option<usize> {
        (i >= 1 && i < self.nx && j < self.ny).then(|| j * (self.nx - 1) + i - 1)
    }

    /// `v` on the face `y = j·hy`, cell column `i` (1 ≤ j ≤ ny−1).
    fn v(&self, i: usize, j: usize) -> Option<usize> {
        (j >= 1 && j < self.ny && i < self.nx).then(|| self.n_u() + (j - 1) * self.nx + i)
    }
}

/// Neighbour across one control-volume face.
enum Nb {
    Unknown(usize),
    /// Dirichlet value one spacing away.
    Boundary,
    /// Wall half a spacing away.
    Wall,
}

/// Adds one face of row `row` to the triplets: diffusion `ν·len/dist` and
/// first-order upwind convection with outward flux `out`.
fn face(t: &mut Vec<(usize, usize, f64)>, row: usize, nb: Nb, diff: f64, out: f64) {
    let (outflow, inflow) = (out.max(0.0), (-out).max(0.0));
    match nb {
        Nb::Unknown(j) => {
            t.push((row, row, diff + outflow));
            t.push((row, j, -diff - inflow));
        }
        Nb::Boundary => t.push((row, row, diff + outflow)),
        // The reflected ghost value is −u, and no fluid crosses the wall.
        Nb::Wall => t.push((row, row, 2.0 * diff)),
    }
}

fn assemble(g: &Grid, nu: f64, wind: Wind) -> Result<MacSystem> {
    let (nx, ny, hx, hy) = (g.nx, g.ny, g.hx, g.hy);
    let mut t = Vec::new();
    let dx = nu * hy / hx;
    let dy = nu * hx / hy;

    for j in 0..ny {
        for i in 1..nx {
            let row = g.u(i, j).expect("interior u");
            let (x, y0, y1) = (i as f64 * hx, j as f64 * hy, (j + 1) as f64 * hy);
            let (xw, xe) = (x - 0.5 * hx, x + 0.5 * hx);
            let nb = |k: Option<usize>| k.map_or(Nb::Boundary, Nb::Unknown);
            face(&mut t, row, nb(g.u(i + 1, j)), dx, wind.flux_x(xe, y0, y1));
            face(&mut t, row, nb(g.u(i - 1, j)), dx, -wind.flux_x(xw, y0, y1));
            let north = if j + 1 < ny {
                Nb::Unknown(g.u(i, j + 1).unwrap())
            } else {
                Nb::Wall
            };
            let south = if j > 0 {
                Nb::Unknown(g.u(i, j - 1).unwrap())
            } else {
                Nb::Wall
            };
            face(&mut t, row, north, dy, wind.flux_y(xw, xe, y1));
            face(&mut t, row, south, dy, -wind.flux_y(xw, xe, y0));
        }
    }
    for j in 1..ny {
        for i in 0..nx {
            let row = g.v(i, j).expect("interior v");
            let (y, x0, x1) = (j as f64 * hy, i as f64 * hx, (i + 1) as f64 * hx);
            let (ys, yn) = (y - 0.5 * hy, y + 0.5 * hy);
            let nb = |k: Option<usize>| k.map_or(Nb::Boundary, Nb::Unknown);
            face(&mut t, row, nb(g.v(i, j + 1)), dy, wind.flux_y(x0, x1, yn));
            face(&mut t, row, nb(g.v(i, j - 1)), dy, -wind.flux_y(x0, x1, ys));
            let east = if i + 1 < nx {
                Nb::Unknown(g.v(i + 1, j).unwrap())
            } else {
                Nb::Wall
            };
            let west = if i > 0 {
                Nb::Unknown(g.v(i - 1, j).unwrap())
            } else {
                Nb::Wall
            };
            face(&mut t, row, east, dx, wind.flux_x(x1, ys, yn));
            face(&mut t, row, west, dx, -wind.flux_x(x0, ys, yn));
        }
    }
    let n = g.n();
    let a = CsrMatrix::from_triplets(n, n, &t)?;

    let mut bt = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let c = j * nx + i;
            if let Some(e) = g.u(i + 1, j) {
                bt.push((c, e, hy));
            }
            if let Some(w) = g.u(i, j) {
                bt.push((c, w, -hy));
            }
            if let Some(nn) = g.v(i, j + 1) {
                bt.push((c, nn, hx));
            }
            if let Some(s) = g.v(i, j) {
                bt.push((c, s, -hx));
            }
        }
    }
    let b = CsrMatrix::from_triplets(nx * ny, n, &bt)?;
    Ok(MacSystem {
        a,
        b,
        w: vec![hx * hy; nx * ny],
    })
}

/// Stokes: the vector Laplacian (ν = 1) with the divergence and cell areas.
pub fn gen_stokes_mac(nx: usize, ny: usize) -> Result<MacSystem> {
    assemble(&Grid::new(nx, ny)?, 1.0, Wind::None)
}

/// Oseen: `ν`-scaled vector Laplacian plus upwind convection by `wind`.
pub fn gen_oseen_mac(nx: usize, ny: usize, nu: f64, wind: Wind) -> Result<MacSystem> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidInput(format!(
            "viscosity must be positive, got {nu}"
        )));
    }
    assemble(&Grid::new(nx, ny)?, nu, wind)
}
