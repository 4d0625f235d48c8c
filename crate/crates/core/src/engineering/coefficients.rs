use serde::{Deserialize, Serialize};

use crate::ode::Dopri5;
use crate::squeeze::{analytic_branch_state, Bogoliubov, Branch, DriveConfig, SqueezeTrajectory};
use crate::{Error, Result, C64, I};

/// `Ω_ℓ`, `Λ_ℓ`, `Ϝ_ℓ` at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSample {
    pub t: f64,
    pub omega: f64,
    pub lambda: C64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchCoefficients {
    pub branch: Option<Branch>,
    pub samples: Vec<CoefficientSample>,
}

/// Coefficients from a squeeze state and the instantaneous drive.
pub(crate) fn coefficients_from(w: f64, kappa: f64, eta: f64, xi: C64, b: &Bogoliubov) -> (f64, C64, f64) {
    // tanh r cos(η − φ) = Re(e^{iη} conj(e^{iφ} tanh r))
    let c = (C64::from_polar(1.0, eta) * b.tanh_r_phase().conj()).re;
    let omega = w + 2.0 * kappa * c;
    let lambda = xi * b.cosh_r() + xi.conj() * b.sinh_r_phase();
    (omega, lambda, kappa * c)
}

/// Evaluate the transformed-Hamiltonian coefficients along a trajectory.
/// At a switching instant the right-hand limit of the drive is used.
pub fn branch_coefficients(cfg: &DriveConfig, traj: &SqueezeTrajectory) -> Result<BranchCoefficients> {
    let samples = traj
        .samples
        .iter()
        .map(|s| {
            let d = cfg.piece(traj.branch, s.t, s.t + f64::EPSILON * s.t.abs().max(1.0) * 4.0);
            let (omega, lambda, f) = coefficients_from(d.w, d.kappa, cfg.eta(s.t), d.xi(s.t), &s.bogoliubov);
            CoefficientSample { t: s.t, omega, lambda, f }
        })
        .collect();
    Ok(BranchCoefficients { branch: traj.branch, samples })
}

/// Continuous-time source of `(Ω, Λ)` for the displacement equation.
pub trait CoefficientModel {
    fn omega_lambda(&self, t: f64, ta: f64, tb: f64) -> Result<(f64, C64)>;
    /// Instants where the coefficients may jump.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Constant `Ω`, `Λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCoefficients {
    pub omega: f64,
    pub lambda: C64,
}

impl CoefficientModel for ConstantCoefficients {
    fn omega_lambda(&self, _t: f64, _ta: f64, _tb: f64) -> Result<(f64, C64)> {
        Ok((self.omega, self.lambda))
    }
}

/// Coefficients built from the closed-form squeeze solutions of a branch
/// starting from vacuum at `t0` (resonant weak-coupling drives only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticCoefficients {
    pub cfg: DriveConfig,
    pub branch: Branch,
}

impl CoefficientModel for AnalyticCoefficients {
    fn omega_lambda(&self, t: f64, ta: f64, tb: f64) -> Result<(f64, C64)> {
        let (r, phi) = analytic_branch_state(&self.cfg, self.branch, t)?;
        let b = Bogoliubov::from_squeeze(r, phi);
        let d = self.cfg.piece(Some(self.branch), ta, tb);
        let (omega, lambda, _) = coefficients_from(d.w, d.kappa, self.cfg.eta(t), d.xi(t), &b);
        Ok((omega, lambda))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.cfg.breakpoints().to_vec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSample {
    pub t: f64,
    pub theta: C64,
    /// Real function with `ḟ = d|θ|²/dt`.
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementTrajectory {
    pub samples: Vec<DisplacementSample>,
}

/// Integrate `iθ̇ = Ωθ + Λ` together with `ḟ = 2 Im(θ*Λ)` through `times`.
pub fn displacement_trajectory<M: CoefficientModel>(
    model: &M,
    theta_initial: C64,
    times: &[f64],
    tol: f64,
) -> Result<DisplacementTrajectory> {
    if times.is_empty() {
        return Err(Error::InvalidInput("empty time span".into()));
    }
    let solver = Dopri5::new(tol, tol * 1e-2);
    let bps = model.breakpoints();
    let mut y = [theta_initial, C64::new(0.0, 0.0)];
    let mut samples = vec![DisplacementSample { t: times[0], theta: y[0], f: 0.0 }];
    for w in times.windows(2) {
        let (lo, hi) = if w[0] <= w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
        let mut pts = vec![w[0]];
        let mut cuts: Vec<f64> = bps.iter().cloned().filter(|&b| b > lo && b < hi).collect();
        if w[1] < w[0] {
            cuts.reverse();
        }
        pts.extend(cuts);
        pts.push(w[1]);
        for p in pts.windows(2) {
            let (ta, tb) = (p[0], p[1]);
            let mut err = None;
            solver.integrate(ta, tb, &mut y, |t, y, dy| match model.omega_lambda(t, ta, tb) {
                Ok((om, la)) => {
                    dy[0] = -I * (y[0] * om + la);
                    dy[1] = C64::new(2.0 * (y[0].conj() * la).im, 0.0);
                }
                Err(e) => {
                    err.get_or_insert(e);
                    dy[0] = C64::new(0.0, 0.0);
                    dy[1] = C64::new(0.0, 0.0);
                }
            })?;
            if let Some(e) = err {
                return Err(e);
            }
        }
        samples.push(DisplacementSample { t: w[1], theta: y[0], f: y[1].re });
    }
    Ok(DisplacementTrajectory { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squeeze::integrate_characteristic;

    #[test]
    fn unsqueezed_coefficients() {
        let cfg = DriveConfig { varkappa: 0.3, ..DriveConfig::resonant(1.0, 0.5, 0.1, 0.0, 1.0, 2.0, 3.0) };
        let tr = integrate_characteristic(&DriveConfig { kappa: 0.0, ..cfg }, Some(Branch::Two), (0.0, 0.0), &[0.0, 1.5])
            .unwrap();
        let c = branch_coefficients(&DriveConfig { kappa: 0.0, ..cfg }, &tr).unwrap();
        let s = c.samples[1];
        assert!((s.omega - 1.5).abs() < 1e-12);
        assert!((s.lambda - C64::from_polar(0.3, -1.5)).norm() < 1e-12);
        assert_eq!(s.f, 0.0);
    }

    #[test]
    fn no_linear_drive_means_no_lambda() {
        let cfg = DriveConfig::resonant(1.0, 0.5, 0.1, 0.0, 1.0, 2.0, 3.0);
        let times: Vec<f64> = (0..=6).map(|k| k as f64 * 0.5).collect();
        let tr = integrate_characteristic(&cfg, Some(Branch::One), (0.0, 0.0), &times).unwrap();
        let c = branch_coefficients(&cfg, &tr).unwrap();
        assert!(c.samples.iter().all(|s| s.lambda.norm() == 0.0));
    }

    #[test]
    fn resonant_fed_branch_has_bare_frequency() {
        let cfg = DriveConfig::resonant(1.2, 0.5, 0.1, 0.0, 2.0, 3.0, 3.0);
        let times: Vec<f64> = (0..=8).map(|k| k as f64 * 0.25).collect();
        let tr = integrate_characteristic(&cfg, Some(Branch::One), (0.0, cfg.eta(0.0) - std::f64::consts::FRAC_PI_2), &times)
            .unwrap();
        let c = branch_coefficients(&cfg, &tr).unwrap();
        for s in &c.samples[..c.samples.len() - 1] {
            assert!((s.omega - 1.2).abs() < 1e-9, "{}", s.omega);
            assert!(s.f.abs() < 1e-9);
        }
    }

    #[test]
    fn zero_forcing_keeps_zero() {
        let m = ConstantCoefficients { omega: 2.0, lambda: C64::new(0.0, 0.0) };
        let tr = displacement_trajectory(&m, C64::new(0.0, 0.0), &[0.0, 3.0], 1e-12).unwrap();
        assert_eq!(tr.samples[1].theta, C64::new(0.0, 0.0));
    }

    #[test]
    fn constant_coefficients_closed_form() {
        let (om, la, th0) = (1.7, C64::new(0.4, -0.2), C64::new(0.3, 0.1));
        let m = ConstantCoefficients { omega: om, lambda: la };
        let times = [0.0, 0.8, 2.5, 4.0];
        let tr = displacement_trajectory(&m, th0, &times, 1e-12).unwrap();
        for s in &tr.samples {
            let exact = (th0 + la / om) * C64::from_polar(1.0, -om * s.t) - la / om;
            assert!((s.theta - exact).norm() < 1e-9);
            assert!((s.f - (s.theta.norm_sqr() - th0.norm_sqr())).abs() < 1e-9);
        }
    }
}
