use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::expm::expm_action;
use super::measures::Moments;
use super::ops::{check_dim, BandedOp, Quadratic};
use crate::{Error, Result, C64};

/// Default bound on the population of the top number states.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Number of top basis states whose population defines the tail.
fn tail_window(n_max: usize) -> usize {
    8.min(n_max / 4)
}

/// Cutoff large enough for a state of coherent amplitude `alpha_abs` squeezed
/// by at most `r_max`: the anti-squeezed quadrature extends to roughly
/// `(|α| + 3.5) e^r`, and the photon number scales with its square.
pub fn suggest_n_max(alpha_abs: f64, r_max: f64) -> usize {
    let g = r_max.max(0.0).exp();
    let x = alpha_abs * g + 3.5 * g + 4.0;
    ((x * x).ceil() as usize).max(16).next_power_of_two()
}

/// Pure state in the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amps: Vec<C64>,
    tail_tol: f64,
}

/// Quadrature expectations `⟨X⟩`, `⟨Y⟩` with `X = (a + a†)/2`, `Y = (a − a†)/2i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadratures {
    pub x: f64,
    pub y: f64,
}

impl FockState {
    /// Normalize the amplitudes and check the tail.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        let mut s = Self { amps, tail_tol: DEFAULT_TAIL_TOL };
        s.normalize()?;
        s.check_tail()?;
        Ok(s)
    }

    /// Normalize without the truncation check.
    pub fn from_amplitudes_unchecked(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        let mut s = Self { amps, tail_tol: DEFAULT_TAIL_TOL };
        s.normalize()?;
        Ok(s)
    }

    pub fn vacuum(n_max: usize) -> Result<Self> {
        Self::number(0, n_max)
    }

    pub fn number(k: usize, n_max: usize) -> Result<Self> {
        check_dim(n_max)?;
        if k >= n_max {
            return Err(Error::InvalidInput(format!("number state {k} outside cutoff {n_max}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); n_max];
        amps[k] = C64::new(1.0, 0.0);
        Ok(Self { amps, tail_tol: DEFAULT_TAIL_TOL })
    }

    pub fn coherent(alpha: C64, n_max: usize) -> Result<Self> {
        coherent_state(alpha, n_max)
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Self {
        self.tail_tol = tol;
        self
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn n_max(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    fn normalize(&mut self) -> Result<()> {
        let nrm = self.norm();
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(Error::DegenerateState);
        }
        for c in &mut self.amps {
            *c /= nrm;
        }
        Ok(())
    }

    /// Population of the top basis states.
    pub fn tail(&self) -> f64 {
        let w = tail_window(self.n_max());
        self.amps[self.n_max() - w..].iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn check_tail(&self) -> Result<()> {
        let tail = self.tail();
        if tail >= self.tail_tol {
            return Err(Error::Truncation { tail, tol: self.tail_tol, n_max: self.n_max() });
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockState) -> Result<C64> {
        if other.n_max() != self.n_max() {
            return Err(Error::DimensionMismatch { expected: self.n_max(), found: other.n_max() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &FockState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `exp(G)|ψ⟩` for an anti-Hermitian generator, renormalized and tail-checked.
    pub fn apply_generator(&self, g: &BandedOp) -> Result<FockState> {
        let amps = expm_action(g, &self.amps)?;
        let mut out = Self { amps, tail_tol: self.tail_tol };
        out.normalize()?;
        out.check_tail()?;
        Ok(out)
    }

    /// `S(ε)|ψ⟩` with `S(ε) = exp[(ε a†² − ε* a²)/2]`.
    pub fn apply_squeeze(&self, eps: C64) -> Result<FockState> {
        if eps == C64::new(0.0, 0.0) {
            return Ok(self.clone());
        }
        let g = BandedOp::quadratic(self.n_max(), Quadratic { ad2: eps * 0.5, a2: -eps.conj() * 0.5, ..Default::default() });
        self.apply_generator(&g)
    }

    /// `D(θ)|ψ⟩` with `D(θ) = exp(θ a† − θ* a)`.
    pub fn apply_displacement(&self, theta: C64) -> Result<FockState> {
        if theta == C64::new(0.0, 0.0) {
            return Ok(self.clone());
        }
        let g = BandedOp::quadratic(self.n_max(), Quadratic { ad: theta, a: -theta.conj(), ..Default::default() });
        self.apply_generator(&g)
    }

    /// `R(β)|ψ⟩ = exp(−i β a†a)|ψ⟩`.
    pub fn apply_rotation(&self, beta: f64) -> FockState {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(n, c)| c * C64::from_polar(1.0, -(n as f64) * beta))
            .collect();
        Self { amps, tail_tol: self.tail_tol }
    }

    /// Multiply by a global phase `e^{iγ}`.
    pub fn apply_phase(&self, gamma: f64) -> FockState {
        let p = C64::from_polar(1.0, gamma);
        Self { amps: self.amps.iter().map(|c| c * p).collect(), tail_tol: self.tail_tol }
    }

    /// Copy into a different cutoff; shrinking must not discard population
    /// above the tail tolerance.
    pub fn resize(&self, n_max: usize) -> Result<FockState> {
        check_dim(n_max)?;
        let mut amps = vec![C64::new(0.0, 0.0); n_max];
        let k = n_max.min(self.n_max());
        amps[..k].copy_from_slice(&self.amps[..k]);
        let lost: f64 = self.amps[k..].iter().map(|c| c.norm_sqr()).sum();
        if lost > self.tail_tol {
            return Err(Error::Truncation { tail: lost, tol: self.tail_tol, n_max });
        }
        let mut s = Self { amps, tail_tol: self.tail_tol };
        s.normalize()?;
        Ok(s)
    }

    pub fn moments(&self) -> Moments {
        let c = &self.amps;
        let n = c.len();
        let mut a = C64::new(0.0, 0.0);
        let mut a2 = C64::new(0.0, 0.0);
        let mut num = 0.0;
        for k in 0..n {
            num += k as f64 * c[k].norm_sqr();
            if k + 1 < n {
                a += c[k].conj() * c[k + 1] * ((k + 1) as f64).sqrt();
            }
            if k + 2 < n {
                a2 += c[k].conj() * c[k + 2] * (((k + 1) * (k + 2)) as f64).sqrt();
            }
        }
        Moments { a, n: num, a2 }
    }

    pub fn quadratures(&self) -> Quadratures {
        let a = self.moments().a;
        Quadratures { x: a.re, y: a.im }
    }

    pub fn to_density(&self) -> DensityMatrix {
        let n = self.n_max();
        DensityMatrix { m: DMatrix::from_fn(n, n, |i, j| self.amps[i] * self.amps[j].conj()) }
    }
}

/// Coherent state `e^{−|α|²/2} Σ αⁿ/√n! |n⟩`, renormalized after truncation.
pub fn coherent_state(alpha: C64, n_max: usize) -> Result<FockState> {
    check_dim(n_max)?;
    let mut amps = Vec::with_capacity(n_max);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amps.push(c);
    for n in 1..n_max {
        c = c * alpha / (n as f64).sqrt();
        amps.push(c);
    }
    FockState::from_amplitudes(amps)
}

pub fn apply_squeeze(state: &FockState, eps: C64) -> Result<FockState> {
    state.apply_squeeze(eps)
}

pub fn apply_displacement(state: &FockState, theta: C64) -> Result<FockState> {
    state.apply_displacement(theta)
}

pub fn apply_rotation(state: &FockState, beta: f64) -> FockState {
    state.apply_rotation(beta)
}

/// Density operator in the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validate Hermiticity (1e−12) and unit trace (1e−10).
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        check_dim(m.nrows())?;
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let d = Self { m };
        let h = d.hermiticity_error();
        if h > 1e-12 {
            return Err(Error::InvalidInput(format!("density matrix not Hermitian ({h:.2e})")));
        }
        let tr = d.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!("density matrix trace {tr}")));
        }
        Ok(d)
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        Self { m }
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self { m: DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0) })
    }

    /// Convex combination of pure states.
    pub fn mixture(parts: &[(f64, &FockState)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidInput("empty mixture".into()))?;
        let n = first.1.n_max();
        let wsum: f64 = parts.iter().map(|p| p.0).sum();
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (w, s) in parts {
            if s.n_max() != n {
                return Err(Error::DimensionMismatch { expected: n, found: s.n_max() });
            }
            m += s.to_density().m * C64::new(w / wsum, 0.0);
        }
        Ok(Self { m })
    }

    pub fn n_max(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.n_max();
        let mut e: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                e = e.max((self.m[(i, j)] - self.m[(j, i)].conj()).norm());
            }
        }
        e
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.m.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.m + self.m.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn tail(&self) -> f64 {
        let n = self.n_max();
        let w = tail_window(n);
        (n - w..n).map(|k| self.m[(k, k)].re).sum()
    }

    pub fn moments(&self) -> Moments {
        let n = self.n_max();
        let mut a = C64::new(0.0, 0.0);
        let mut a2 = C64::new(0.0, 0.0);
        let mut num = 0.0;
        for k in 0..n {
            num += k as f64 * self.m[(k, k)].re;
            if k + 1 < n {
                a += self.m[(k + 1, k)] * ((k + 1) as f64).sqrt();
            }
            if k + 2 < n {
                a2 += self.m[(k + 2, k)] * (((k + 1) * (k + 2)) as f64).sqrt();
            }
        }
        Moments { a, n: num, a2 }
    }
}
