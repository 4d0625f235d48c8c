use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::state::{DensityMatrix, FockState};
use crate::{Error, Result, C64};

/// Rectangular grid in the `γ = x + iy` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, n: usize) -> Self {
        Self { x_min: -half_width, x_max: half_width, nx: n, y_min: -half_width, y_max: half_width, ny: n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidInput("Wigner grid needs at least 2 points per axis".into()));
        }
        if !(self.x_max > self.x_min) || !(self.y_max > self.y_min) {
            return Err(Error::InvalidInput("Wigner grid range is empty".into()));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        linspace(self.y_min, self.y_max, self.ny)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Wigner function sampled on a grid; `w[iy * nx + ix]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub w: Vec<f64>,
}

impl WignerGrid {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.w[iy * self.xs.len() + ix]
    }

    /// Trapezoidal integral over the grid window.
    pub fn integral(&self) -> f64 {
        let nx = self.xs.len();
        let ny = self.ys.len();
        let dx = (self.xs[nx - 1] - self.xs[0]) / (nx - 1) as f64;
        let dy = (self.ys[ny - 1] - self.ys[0]) / (ny - 1) as f64;
        let mut acc = 0.0;
        for iy in 0..ny {
            let wy = if iy == 0 || iy == ny - 1 { 0.5 } else { 1.0 };
            for ix in 0..nx {
                let wx = if ix == 0 || ix == nx - 1 { 0.5 } else { 1.0 };
                acc += wx * wy * self.at(ix, iy);
            }
        }
        acc * dx * dy
    }

    pub fn min(&self) -> f64 {
        self.w.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.w.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `ψ(x) = Σ cₙ φₙ(x)` at the points `x0 + j h`, `j = -J..=J`, with
/// oscillator eigenfunctions `φₙ` for `a = (x + ip)/√2`.
///
/// The Hermite recurrence runs on a rescaled value with a separate log
/// scale so the Gaussian prefactor never underflows at large `n`.
fn wavefunction_line(c: &[C64], x0: f64, h: f64, j_max: usize) -> Vec<C64> {
    let d = c.len();
    let up: Vec<f64> = (0..d).map(|n| (2.0 / (n as f64 + 1.0)).sqrt()).collect();
    let down: Vec<f64> = (0..d).map(|n| (n as f64 / (n as f64 + 1.0)).sqrt()).collect();
    const BIG: f64 = 1e200;
    let ln_big = BIG.ln();
    let ln_pi_4 = std::f64::consts::PI.ln() / 4.0;
    (0..=2 * j_max)
        .map(|k| {
            let x = x0 + (k as f64 - j_max as f64) * h;
            let mut ls = -0.5 * x * x - ln_pi_4;
            let mut scale = ls.exp();
            let (mut prev, mut cur) = (0.0, 1.0);
            let mut acc = C64::new(0.0, 0.0);
            for n in 0..d {
                acc += c[n] * (cur * scale);
                let next = up[n] * x * cur - down[n] * prev;
                prev = cur;
                cur = next;
                if cur.abs() > BIG {
                    cur /= BIG;
                    prev /= BIG;
                    ls += ln_big;
                    scale = ls.exp();
                }
            }
            acc
        })
        .collect()
}

/// Quadrature step and half-length for a basis of dimension `d` and
/// momenta up to `p_max`.
fn quadrature(d: usize, p_max: f64) -> (f64, usize) {
    let support = (2.0 * d as f64 + 1.0).sqrt() + 6.0;
    let k_max = 2.0 * (2.0 * d as f64 + 1.0).sqrt() + 2.0 * p_max;
    let h = 0.6 * std::f64::consts::PI / k_max;
    (h, (support / h).ceil() as usize)
}

/// Columns `W(xs[i], ·)` of an unnormalised pure state, weighted by `weight`.
///
/// `W(x, p) = (1/π) ∫ ψ*(x+y) ψ(x−y) e^{2ipy} dy` with `γ = (x + ip)/√2`,
/// summed with the trapezoidal rule on a step that resolves the highest
/// local wavenumber of the basis; the sum converges exponentially.
fn pure_columns(c: &[C64], weight: f64, xs: &[f64], ys: &[f64]) -> Vec<Vec<f64>> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let p_max = ys.iter().fold(0.0f64, |m, y| m.max(y.abs())) * sqrt2;
    let (h, j_max) = quadrature(c.len(), p_max);
    // factor 2 converts W(x, p) dx dp to the γ-plane measure
    let pref = weight * 2.0 * h / std::f64::consts::PI;
    xs.par_iter()
        .map(|&gx| {
            let line = wavefunction_line(c, sqrt2 * gx, h, j_max);
            // ψ*(x + jh) ψ(x − jh) for j ≥ 1
            let prod: Vec<C64> = (1..=j_max).map(|j| line[j_max + j].conj() * line[j_max - j]).collect();
            let centre = line[j_max].norm_sqr();
            ys.iter()
                .map(|&gy| {
                    let step = C64::from_polar(1.0, 2.0 * sqrt2 * gy * h);
                    let mut ph = step;
                    let mut sum = 0.0;
                    for q in &prod {
                        sum += (q * ph).re;
                        ph *= step;
                    }
                    pref * (centre + 2.0 * sum)
                })
                .collect()
        })
        .collect()
}

fn assemble(xs: Vec<f64>, ys: Vec<f64>, columns: &[Vec<f64>]) -> WignerGrid {
    let nx = xs.len();
    let mut w = vec![0.0; nx * ys.len()];
    for (ix, col) in columns.iter().enumerate() {
        for (iy, v) in col.iter().enumerate() {
            w[iy * nx + ix] += *v;
        }
    }
    WignerGrid { xs, ys, w }
}

/// Eigen-decomposition `ρ = Σ pₖ |ψₖ⟩⟨ψₖ|`, dropping weights below 1e−15.
fn mixture(rho: &DensityMatrix) -> Vec<(f64, Vec<C64>)> {
    let eig = rho.matrix().clone().symmetric_eigen();
    eig.eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, p)| p.abs() > 1e-15)
        .map(|(k, p)| (*p, eig.eigenvectors.column(k).iter().copied().collect()))
        .collect()
}

fn mixed_columns(rho: &DensityMatrix, xs: &[f64], ys: &[f64]) -> Vec<Vec<f64>> {
    let mut acc = vec![vec![0.0; ys.len()]; xs.len()];
    for (p, v) in mixture(rho) {
        for (a, col) in acc.iter_mut().zip(pure_columns(&v, p, xs, ys)) {
            for (x, y) in a.iter_mut().zip(col) {
                *x += y;
            }
        }
    }
    acc
}

/// `W(γ) = (2/π) Tr[ρ D(γ) Π D†(γ)]` at one point.
pub fn wigner_point(rho: &DensityMatrix, gamma: C64) -> f64 {
    mixed_columns(rho, &[gamma.re], &[gamma.im])[0][0]
}

/// Wigner function of a density matrix on a grid.
pub fn wigner(rho: &DensityMatrix, grid: &GridSpec) -> Result<WignerGrid> {
    grid.validate()?;
    let (xs, ys) = (grid.xs(), grid.ys());
    let cols = mixed_columns(rho, &xs, &ys);
    Ok(assemble(xs, ys, &cols))
}

/// Wigner function of a pure state, without forming `|ψ⟩⟨ψ|`.
///
/// Cost is `O(nx·J·n_max + nx·ny·J)` with `J ∝ n_max`.
pub fn wigner_pure(psi: &FockState, grid: &GridSpec) -> Result<WignerGrid> {
    grid.validate()?;
    let (xs, ys) = (grid.xs(), grid.ys());
    let cols = pure_columns(psi.amplitudes(), 1.0, &xs, &ys);
    Ok(assemble(xs, ys, &cols))
}
