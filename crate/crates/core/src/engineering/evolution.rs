use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::coefficients::coefficients_from;
use crate::fock::{expm_dense, BandedOp, FockState, Quadratic};
use crate::ode::Dopri5;
use crate::squeeze::{Bogoliubov, Branch, DriveConfig};
use crate::{Error, Result, C64, I};

/// Factors of `U = e^{iγ} S(ε) D(θ) R(β)` at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorFactors {
    pub epsilon: C64,
    pub theta: C64,
    pub beta: f64,
    pub gamma: f64,
}

impl OperatorFactors {
    pub fn identity() -> Self {
        Self { epsilon: C64::new(0.0, 0.0), theta: C64::new(0.0, 0.0), beta: 0.0, gamma: 0.0 }
    }

    /// `U|ψ⟩`.
    pub fn apply(&self, psi: &FockState) -> Result<FockState> {
        psi.apply_rotation(self.beta)
            .apply_displacement(self.theta)?
            .apply_squeeze(self.epsilon)
            .map(|s| s.apply_phase(self.gamma))
    }

    /// `U†|ψ⟩`.
    pub fn apply_inverse(&self, psi: &FockState) -> Result<FockState> {
        Ok(psi
            .apply_phase(-self.gamma)
            .apply_squeeze(-self.epsilon)?
            .apply_displacement(-self.theta)?
            .apply_rotation(-self.beta))
    }

    /// Dense matrix of `U` in an `n`-dimensional truncated basis.
    pub fn matrix(&self, n: usize) -> Result<DMatrix<C64>> {
        let s = expm_dense(
            &BandedOp::quadratic(n, Quadratic { ad2: self.epsilon * 0.5, a2: -self.epsilon.conj() * 0.5, ..Default::default() })
                .to_dense(),
        )?;
        let d = expm_dense(&BandedOp::quadratic(n, Quadratic { ad: self.theta, a: -self.theta.conj(), ..Default::default() }).to_dense())?;
        let r = DMatrix::from_fn(n, n, |i, j| if i == j { C64::from_polar(1.0, -(i as f64) * self.beta) } else { C64::new(0.0, 0.0) });
        Ok(s * d * r * C64::from_polar(1.0, self.gamma))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSample {
    pub t: f64,
    pub bogoliubov: Bogoliubov,
    pub theta: C64,
    pub beta: f64,
    pub gamma: f64,
    pub f: f64,
}

impl EvolutionSample {
    pub fn factors(&self) -> OperatorFactors {
        OperatorFactors { epsilon: self.bogoliubov.epsilon(), theta: self.theta, beta: self.beta, gamma: self.gamma }
    }

    pub fn r(&self) -> f64 {
        self.bogoliubov.r()
    }

    pub fn phi(&self) -> f64 {
        self.bogoliubov.phi()
    }
}

/// Trajectories of `ε_ℓ`, `θ_ℓ`, `β_ℓ`, `f_ℓ` and the global phase, starting
/// from the identity at `t0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchEvolution {
    pub branch: Option<Branch>,
    pub samples: Vec<EvolutionSample>,
}

impl BranchEvolution {
    /// Integrate from `cfg.t0` through the given (ascending) times, all of
    /// which must be `>= t0`.
    pub fn compute(cfg: &DriveConfig, branch: Option<Branch>, times: &[f64], rtol: f64) -> Result<Self> {
        cfg.validate()?;
        if times.iter().any(|&t| t < cfg.t0) || times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput("evolution times must be ascending and not before t0".into()));
        }
        let solver = Dopri5::new(rtol, rtol * 1e-3);
        // y = [μ, ν̄, θ, β, γ, f]
        let mut y = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let mut t = cfg.t0;
        let mut samples = Vec::with_capacity(times.len());
        for &target in times {
            for (ta, tb) in cfg.split(t, target) {
                let d = cfg.piece(branch, ta, tb);
                solver.integrate_with(
                    ta,
                    tb,
                    &mut y,
                    |t, y, dy| {
                        let (dmu, dnb) = d.bogoliubov_rhs(t, y[0], y[1]);
                        let b = Bogoliubov { mu: y[0], nu: y[1].conj() };
                        let xi = d.xi(t);
                        let (omega, lambda, f) = coefficients_from(d.w, d.kappa, d.eta_slope * t, xi, &b);
                        let th = y[2];
                        dy[0] = dmu;
                        dy[1] = dnb;
                        dy[2] = -I * (th * omega + lambda);
                        dy[3] = C64::new(omega, 0.0);
                        dy[4] = C64::new(-(f + (th.conj() * lambda).re), 0.0);
                        dy[5] = C64::new(2.0 * (th.conj() * lambda).im, 0.0);
                    },
                    |_, y| {
                        let mut b = Bogoliubov { mu: y[0], nu: y[1] };
                        b.renormalize();
                        y[0] = b.mu;
                        y[1] = b.nu;
                        true
                    },
                )?;
            }
            t = target;
            samples.push(EvolutionSample {
                t,
                bogoliubov: Bogoliubov { mu: y[0], nu: y[1].conj() },
                theta: y[2],
                beta: y[3].re,
                gamma: y[4].re,
                f: y[5].re,
            });
        }
        Ok(Self { branch, samples })
    }

    pub fn at(&self, t: f64) -> Result<&EvolutionSample> {
        self.samples
            .iter()
            .find(|s| (s.t - t).abs() <= 1e-12 * t.abs().max(1e-300) || s.t == t)
            .ok_or_else(|| Error::InvalidInput(format!("time {t} not sampled in branch evolution")))
    }

    /// Factorized propagator from `t0` to `t`; `t = t0` gives the identity.
    pub fn factors(&self, cfg: &DriveConfig, t: f64) -> Result<OperatorFactors> {
        if t == cfg.t0 {
            return Ok(OperatorFactors::identity());
        }
        Ok(self.at(t)?.factors())
    }
}

/// `𝕌(t, t_i) = U(t) U†(t_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComposedEvolution {
    pub t_i: f64,
    pub t: f64,
    pub later: OperatorFactors,
    pub earlier: OperatorFactors,
}

impl ComposedEvolution {
    pub fn apply(&self, psi: &FockState) -> Result<FockState> {
        self.later.apply(&self.earlier.apply_inverse(psi)?)
    }

    pub fn matrix(&self, n: usize) -> Result<DMatrix<C64>> {
        Ok(self.later.matrix(n)? * self.earlier.matrix(n)?.adjoint())
    }
}

pub fn compose_evolution(cfg: &DriveConfig, evo: &BranchEvolution, t_i: f64, t: f64) -> Result<ComposedEvolution> {
    Ok(ComposedEvolution { t_i, t, later: evo.factors(cfg, t)?, earlier: evo.factors(cfg, t_i)? })
}

impl BranchEvolution {
    /// `𝖴_ℓ(t, t0)|ψ⟩ = 𝕌(t, t2) 𝕌_ℓ(t2, t1) 𝕌(t1, t0)|ψ⟩` for `t >= t2`.
    pub fn propagate_chained(&self, cfg: &DriveConfig, t: f64, psi: &FockState) -> Result<FockState> {
        if t < cfg.t2 {
            return Err(Error::InvalidInput("chained propagation needs t >= t2".into()));
        }
        let s1 = compose_evolution(cfg, self, cfg.t0, cfg.t1)?.apply(psi)?;
        let s2 = compose_evolution(cfg, self, cfg.t1, cfg.t2)?.apply(&s1)?;
        compose_evolution(cfg, self, cfg.t2, t)?.apply(&s2)
    }

    /// `U(t)|ψ⟩` in one application.
    pub fn propagate(&self, cfg: &DriveConfig, t: f64, psi: &FockState) -> Result<FockState> {
        self.factors(cfg, t)?.apply(psi)
    }
}
