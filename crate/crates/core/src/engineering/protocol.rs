use serde::{Deserialize, Serialize};

use super::evolution::BranchEvolution;
use crate::fock::{phase_space_distance, suggest_n_max, FockState, DEFAULT_TAIL_TOL};
use crate::squeeze::{analytic_branch_state, classify_regime, integrate_characteristic, Branch, DriveConfig, RegimeClass};
use crate::{wrap_pi, Error, Result, C64};

/// Initial field and atomic superposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub alpha: C64,
    pub c1: C64,
    pub c2: C64,
    /// Detected atomic level: 2 keeps the symmetric, 1 the antisymmetric combination.
    pub detected: u8,
    pub target_theta: Option<f64>,
}

impl ProtocolConfig {
    pub fn balanced(alpha: C64, detected: u8) -> Self {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        Self { alpha, c1: C64::new(c, 0.0), c2: C64::new(c, 0.0), detected, target_theta: None }
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.c1.norm_sqr() + self.c2.norm_sqr();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("|c1|^2 + |c2|^2 = {s}, expected 1")));
        }
        if self.detected != 1 && self.detected != 2 {
            return Err(Error::InvalidInput(format!("detected state must be 1 or 2, got {}", self.detected)));
        }
        if !self.alpha.re.is_finite() || !self.alpha.im.is_finite() {
            return Err(Error::InvalidInput("alpha must be finite".into()));
        }
        Ok(())
    }

    /// Sign multiplying the branch-1 term.
    pub fn sign(&self) -> f64 {
        if self.detected == 2 {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineeringOptions {
    /// Fixed cutoff; `None` selects one from the squeezing and amplitude.
    pub n_max: Option<usize>,
    pub tail_tol: f64,
    pub rtol: f64,
}

impl Default for EngineeringOptions {
    fn default() -> Self {
        Self { n_max: None, tail_tol: DEFAULT_TAIL_TOL, rtol: 1e-11 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatSummary {
    /// `r_ℓ(t2)` for ℓ = 1, 2.
    pub r: [f64; 2],
    /// `φ_ℓ(t2)`.
    pub phi: [f64; 2],
    /// `φ₁(t2) − φ₂(t2)` wrapped to (−π, π].
    pub theta: f64,
    pub mean_n: f64,
    /// Distance between the phase-space centers of the two branch states.
    pub distance: f64,
    /// `⟨ψ₁|ψ₂⟩` of the branch states.
    pub overlap: C64,
    /// Normalization factor of the superposition.
    pub norm_factor: f64,
    pub n_max: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct PreparedCat {
    pub state: FockState,
    /// `𝖴_ℓ(t_end, t0)|α⟩`.
    pub branch_states: [FockState; 2],
    pub evolutions: [BranchEvolution; 2],
    pub summary: CatSummary,
}

fn cutoff_for(cfg: &DriveConfig, alpha: C64, opts: &EngineeringOptions, evos: &[BranchEvolution]) -> usize {
    if let Some(n) = opts.n_max {
        return n;
    }
    let mut r_max: f64 = 0.0;
    let mut th_max: f64 = 0.0;
    for e in evos {
        for s in &e.samples {
            r_max = r_max.max(s.r());
            th_max = th_max.max(s.theta.norm());
        }
    }
    let _ = cfg;
    suggest_n_max(alpha.norm() + th_max, r_max)
}

fn evolution_times(cfg: &DriveConfig) -> Vec<f64> {
    let mut ts = vec![cfg.t0, cfg.t1];
    for k in 1..16 {
        ts.push(cfg.t1 + (cfg.t2 - cfg.t1) * k as f64 / 16.0);
    }
    ts.push(cfg.t2);
    ts.push(cfg.t_end);
    ts
}

/// Field state after the three-segment evolution and atomic detection:
/// `𝒩[± e^{iω0 t/2} c1 𝖴₁|α⟩ + e^{−iω0 t/2} c2 𝖴₂|α⟩]` at `t = t_end`.
pub fn prepare_cat(cfg: &DriveConfig, protocol: &ProtocolConfig, opts: &EngineeringOptions) -> Result<PreparedCat> {
    cfg.validate()?;
    protocol.validate()?;
    let times = evolution_times(cfg);
    let (e1, e2) = rayon::join(
        || BranchEvolution::compute(cfg, Some(Branch::One), &times, opts.rtol),
        || BranchEvolution::compute(cfg, Some(Branch::Two), &times, opts.rtol),
    );
    let evos = [e1?, e2?];
    let n = cutoff_for(cfg, protocol.alpha, opts, &evos);
    let psi0 = FockState::coherent(protocol.alpha, n)?.with_tail_tol(opts.tail_tol);
    let (s1, s2) = rayon::join(
        || evos[0].propagate_chained(cfg, cfg.t_end, &psi0),
        || evos[1].propagate_chained(cfg, cfg.t_end, &psi0),
    );
    let (s1, s2) = (s1?, s2?);
    let t = cfg.t_end;
    let w1 = C64::from_polar(protocol.sign(), cfg.omega0 * t / 2.0) * protocol.c1;
    let w2 = C64::from_polar(1.0, -cfg.omega0 * t / 2.0) * protocol.c2;
    let amps: Vec<C64> = s1.amplitudes().iter().zip(s2.amplitudes()).map(|(a, b)| w1 * a + w2 * b).collect();
    let raw_norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if raw_norm < 1e-12 {
        return Err(Error::DegenerateState);
    }
    let state = FockState::from_amplitudes_unchecked(amps)?.with_tail_tol(opts.tail_tol);
    state.check_tail()?;
    let mut warnings = Vec::new();
    if cfg.chi == 0.0 {
        warnings.push("degenerate branches: chi = 0, both branch states coincide".to_string());
    }
    let at_t2 = [evos[0].at(cfg.t2)?, evos[1].at(cfg.t2)?];
    let r = [at_t2[0].r(), at_t2[1].r()];
    let phi = [at_t2[0].phi(), at_t2[1].phi()];
    let summary = CatSummary {
        r,
        phi,
        theta: wrap_pi(phi[0] - phi[1]),
        mean_n: state.moments().n,
        distance: phase_space_distance(&s1, &s2),
        overlap: s1.inner(&s2)?,
        norm_factor: 1.0 / raw_norm,
        n_max: n,
        warnings,
    };
    Ok(PreparedCat { state, branch_states: [s1, s2], evolutions: evos, summary })
}

/// Amplitude `|α| e^{i(arg ν − arg μ)/2}` of branch 1 at `t_end`, which
/// places the initial displacement on the stretched axis of the final squeeze.
pub fn aligned_alpha(cfg: &DriveConfig, magnitude: f64, opts: &EngineeringOptions) -> Result<C64> {
    let evo = BranchEvolution::compute(cfg, Some(Branch::One), &[cfg.t_end], opts.rtol)?;
    let b = evo.samples[0].bogoliubov;
    if b.nu.norm() == 0.0 {
        return Ok(C64::new(magnitude, 0.0));
    }
    Ok(C64::from_polar(magnitude, 0.5 * (b.nu.arg() - b.mu.arg())))
}

/// Search targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchTargets {
    pub theta: f64,
    pub mean_n: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub drive: DriveConfig,
    pub protocol: ProtocolConfig,
    /// Atom-field interaction time `t2 − t1`.
    pub tau: f64,
    /// Pump duration `t2 − t0`.
    pub duration: f64,
    pub theta_achieved: f64,
    pub mean_n_achieved: Option<f64>,
    pub evaluations: usize,
}

/// Timeline with `t2` and `t_end − t2` kept from the template.
fn with_timing(template: &DriveConfig, tau: f64, duration: f64) -> DriveConfig {
    let t2 = template.t2;
    DriveConfig { t0: t2 - duration, t1: t2 - tau, t2, t_end: t2 + (template.t_end - template.t2), ..*template }
}

/// `Θ = φ₁(t2) − φ₂(t2)` for the given interaction time and pump duration,
/// from the closed forms in weak coupling and the integrator otherwise.
pub fn theta_for_tau(template: &DriveConfig, tau: f64, duration: f64) -> Result<f64> {
    let cfg = with_timing(template, tau, duration);
    let weak = classify_regime(&cfg, Branch::One).class == RegimeClass::Weak && cfg.is_resonant();
    let phi = |b: Branch| -> Result<f64> {
        if weak {
            Ok(analytic_branch_state(&cfg, b, cfg.t2)?.1)
        } else {
            let tr = integrate_characteristic(&cfg, Some(b), (0.0, 0.0), &[cfg.t0, cfg.t2])?;
            Ok(tr.last().phi)
        }
    };
    Ok(wrap_pi(phi(Branch::One)? - phi(Branch::Two)?))
}

fn solve_tau(template: &DriveConfig, target: f64, duration: f64) -> Result<(f64, usize)> {
    let unit = std::f64::consts::PI / (2.0 * template.chi);
    let tau_min = 0.05 * unit;
    let tau_max = duration;
    if tau_max <= tau_min {
        return Err(Error::Infeasible {
            reason: format!("pump duration {duration:.6e} shorter than the minimum interaction time {tau_min:.6e}"),
        });
    }
    let m = ((tau_max / unit) * 40.0).ceil().clamp(200.0, 20000.0) as usize;
    let g = |tau: f64| -> Result<f64> { Ok(wrap_pi(theta_for_tau(template, tau, duration)? - target)) };
    let mut evals = 0;
    let mut prev_tau = tau_min;
    let mut prev = g(prev_tau)?;
    evals += 1;
    let (mut lo_env, mut hi_env) = (prev + target, prev + target);
    for k in 1..=m {
        let tau = tau_min + (tau_max - tau_min) * k as f64 / m as f64;
        let cur = g(tau)?;
        evals += 1;
        lo_env = lo_env.min(wrap_pi(cur + target));
        hi_env = hi_env.max(wrap_pi(cur + target));
        if cur == 0.0 {
            return Ok((tau, evals));
        }
        if prev.signum() != cur.signum() && (cur - prev).abs() < std::f64::consts::PI {
            let (mut a, mut b, mut ga) = (prev_tau, tau, prev);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let gm = g(mid)?;
                evals += 1;
                if gm == 0.0 {
                    return Ok((mid, evals));
                }
                if gm.signum() == ga.signum() {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            return Ok((0.5 * (a + b), evals));
        }
        prev = cur;
        prev_tau = tau;
    }
    Err(Error::Infeasible {
        reason: format!(
            "target Theta = {target:.6} not reached for tau in [{tau_min:.6e}, {tau_max:.6e}]; achieved envelope [{lo_env:.6}, {hi_env:.6}]"
        ),
    })
}

/// Choose the interaction time for a target `Θ` and, optionally, the pump
/// duration for a target mean photon number. The initial amplitude keeps
/// its modulus and is rotated onto the stretched axis.
pub fn protocol_search(
    template: &DriveConfig,
    protocol: &ProtocolConfig,
    targets: &SearchTargets,
    opts: &EngineeringOptions,
) -> Result<SearchResult> {
    template.validate()?;
    protocol.validate()?;
    if template.chi <= 0.0 || template.kappa <= 0.0 {
        return Err(Error::InvalidInput("protocol search needs chi > 0 and kappa > 0".into()));
    }
    if !template.is_resonant() {
        return Err(Error::NotResonant { eta_slope: template.eta_slope, omega: template.omega });
    }
    let mut evaluations = 0;
    let finish = |duration: f64, evaluations: &mut usize| -> Result<(DriveConfig, ProtocolConfig, f64)> {
        let (tau, ev) = solve_tau(template, targets.theta, duration)?;
        *evaluations += ev;
        let cfg = with_timing(template, tau, duration);
        let alpha = aligned_alpha(&cfg, protocol.alpha.norm(), opts)?;
        Ok((cfg, ProtocolConfig { alpha, target_theta: Some(targets.theta), ..*protocol }, tau))
    };
    let (cfg, proto, tau, mean_n) = match targets.mean_n {
        None => {
            let (cfg, proto, tau) = finish(template.t2 - template.t0, &mut evaluations)?;
            (cfg, proto, tau, None)
        }
        Some(target) => {
            if !(target > 0.0) {
                return Err(Error::InvalidInput("mean photon number target must be positive".into()));
            }
            let eval_n = |duration: f64, evaluations: &mut usize| -> Result<(f64, DriveConfig, ProtocolConfig, f64)> {
                let (cfg, proto, tau) = finish(duration, evaluations)?;
                let n = prepare_cat(&cfg, &proto, opts)?.summary.mean_n;
                Ok((n, cfg, proto, tau))
            };
            let a2 = protocol.alpha.norm_sqr().max(1e-12);
            let r_guess = 0.5 * (target / a2).ln().max(0.0);
            let unit = std::f64::consts::PI / (2.0 * template.chi);
            let (tau_guess, ev) = solve_tau(template, targets.theta, template.t2 - template.t0)?;
            evaluations += ev;
            let d_min = 0.05 * unit * 1.0001;
            let mut x0 = (tau_guess + r_guess / (2.0 * template.kappa)).max(d_min);
            let mut x1 = x0 + 0.05 / (2.0 * template.kappa);
            let (n0, ..) = eval_n(x0, &mut evaluations)?;
            let mut f0 = (n0 / target).ln();
            let mut best = None;
            for _ in 0..40 {
                let (n1, cfg, proto, tau) = eval_n(x1, &mut evaluations)?;
                let f1 = (n1 / target).ln();
                if (n1 / target - 1.0).abs() < 2e-3 {
                    best = Some((cfg, proto, tau, n1));
                    break;
                }
                let slope = (f1 - f0) / (x1 - x0);
                if !(slope > 0.0) || !slope.is_finite() {
                    return Err(Error::Infeasible {
                        reason: format!("mean photon number {target} not reachable: <n> does not grow with the pump duration near {x1:.6e}"),
                    });
                }
                let mut x2 = x1 - f1 / slope;
                if x2 < d_min {
                    if x1 <= d_min * 1.000001 {
                        return Err(Error::Infeasible {
                            reason: format!("mean photon number {target} below the reachable minimum {n1:.4}"),
                        });
                    }
                    x2 = d_min;
                }
                x0 = x1;
                f0 = f1;
                x1 = x2;
            }
            let (cfg, proto, tau, n) =
                best.ok_or_else(|| Error::Infeasible { reason: format!("mean photon number {target} not reached") })?;
            (cfg, proto, tau, Some(n))
        }
    };
    let theta_achieved = theta_for_tau(template, tau, cfg.t2 - cfg.t0)?;
    Ok(SearchResult {
        drive: cfg,
        protocol: proto,
        tau,
        duration: cfg.t2 - cfg.t0,
        theta_achieved,
        mean_n_achieved: mean_n,
        evaluations,
    })
}

/// Cavity and pump parameters of the headline configuration, in SI units
/// and in the frame rotating at the cavity frequency (`ω = ω0 = 0`):
/// `χ = 1.1×10⁵ s⁻¹`, `κ = 0.05χ` (`|P| = 0.1`), pump on for `2×10⁻⁴ s`,
/// `α = √2`, balanced atomic superposition. The interaction time is a
/// placeholder until [`headline_preset`] solves it for `Θ = 0`.
pub fn headline_template() -> (DriveConfig, ProtocolConfig) {
    let chi = 1.1e5;
    let t2 = 2e-4;
    let cfg = DriveConfig {
        omega: 0.0,
        omega0: 0.0,
        chi,
        kappa: 0.05 * chi,
        eta_slope: 0.0,
        varkappa: 0.0,
        varpi_slope: 0.0,
        t0: 0.0,
        t1: t2 - 1.5e-5,
        t2,
        t_end: t2,
    };
    let mut p = ProtocolConfig::balanced(C64::new(2f64.sqrt(), 0.0), 2);
    p.target_theta = Some(0.0);
    (cfg, p)
}

/// Headline configuration with the interaction time solved for `Θ = 0`.
pub fn headline_preset(opts: &EngineeringOptions) -> Result<(DriveConfig, ProtocolConfig)> {
    let (cfg, p) = headline_template();
    let res = protocol_search(&cfg, &p, &SearchTargets { theta: 0.0, mean_n: None }, opts)?;
    Ok((res.drive, res.protocol))
}
