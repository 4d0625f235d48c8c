//! Maximisation of the decoherence time over the bath squeeze parameters.
//!
//! For fixed state moments the decoherence time depends on `(r̃, φ̃)` through
//!
//! ```text
//! τ_R / τ = 2|cosh(2r̃)P − sinh(2r̃)Re[e^{iφ̃}Δ*] − ½|,
//! P = ⟨a†a⟩ − |⟨a⟩|² + ½,  Δ = ⟨a²⟩ − ⟨a⟩²
//! ```
//!
//! The general search is a grid followed by a Nelder–Mead refinement; the
//! large-amplitude closed forms are kept separately as reference values.

use rayon::prelude::*;
use serde::Serialize;

use crate::dissipation::{decoherence_time_analytic, ReservoirParams};
use crate::fock::Moments;
use crate::serde_ext::{f64_ext, opt_f64_ext};
use crate::{angle_diff, wrap_2pi, Error, Result};

/// Which closed-form optimum applies: `A` when the components are stretched
/// along their displacement (squeeze angle `0 mod 2π` in this crate's
/// convention), `B` when they are compressed along it (angle `π mod 2π`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReservoirCase {
    A,
    B,
}

/// Closed-form optimal bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormOptimum {
    pub case: ReservoirCase,
    pub r_tilde: f64,
    pub phi_tilde: f64,
    /// Value before clamping at zero.
    pub r_tilde_unclamped: f64,
    /// `true` when the formula gave a negative squeeze factor.
    pub clamped: bool,
}

/// `r̃ = r ± ln(1+4α²)/4` with `φ̃ = 0` (case A) or `π` (case B).
pub fn optimal_reservoir_closed_form(alpha: f64, r: f64, case: ReservoirCase) -> Result<ClosedFormOptimum> {
    if !(alpha.is_finite() && r.is_finite()) {
        return Err(Error::InvalidInput("alpha and r must be finite".into()));
    }
    let shift = (1.0 + 4.0 * alpha * alpha).ln() / 4.0;
    let (raw, phi) = match case {
        ReservoirCase::A => (r + shift, 0.0),
        ReservoirCase::B => (r - shift, std::f64::consts::PI),
    };
    Ok(ClosedFormOptimum { case, r_tilde: raw.max(0.0), phi_tilde: phi, r_tilde_unclamped: raw, clamped: raw < 0.0 })
}

/// Exact maximiser of the decoherence time for given moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentOptimum {
    pub r_tilde: f64,
    pub phi_tilde: f64,
    #[serde(serialize_with = "f64_ext")]
    pub tau: f64,
}

/// `φ̃ = arg Δ`, `tanh 2r̃ = |Δ|/P`.
///
/// The uncertainty relation `P² − |Δ|² ≥ ¼` keeps the kernel non-negative,
/// so its minimum over the bath is `√(P² − |Δ|²) − ½`; it vanishes exactly
/// for minimum-uncertainty Gaussian states, which gives an infinite time.
pub fn moment_optimum(m: &Moments, tau_r: f64) -> Result<MomentOptimum> {
    if !(tau_r.is_finite() && tau_r > 0.0) {
        return Err(Error::InvalidInput(format!("tau_r must be positive (got {tau_r})")));
    }
    let p = m.centered_n() + 0.5;
    let delta = m.centered_a2();
    let ratio = delta.norm() / p;
    if !(ratio < 1.0) {
        return Err(Error::InvalidInput(format!("moments violate the uncertainty relation (|Δ|/P = {ratio})")));
    }
    let r_tilde = 0.5 * ratio.atanh();
    let phi_tilde = if delta.norm() == 0.0 { 0.0 } else { wrap_2pi(delta.arg()) };
    let kernel = ((p - delta.norm()) * (p + delta.norm())).max(0.0).sqrt() - 0.5;
    let tau = if kernel.abs() <= crate::dissipation::POINTER_RATE_TOL { f64::INFINITY } else { tau_r / (2.0 * kernel) };
    Ok(MomentOptimum { r_tilde, phi_tilde, tau })
}

/// Search region and stopping rule.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub r_max: f64,
    pub r_step: f64,
    pub phi_points: usize,
    /// Relative spread of `τ` over the simplex at which refinement stops.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { r_max: 6.0, r_step: 0.05, phi_points: 720, tol: 1e-12, max_iter: 5000 }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_step > 0.0 && self.r_step <= self.r_max) || self.phi_points == 0 {
            return Err(Error::InvalidInput("empty reservoir search grid".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidInput(format!("refinement tolerance must be in (0,1) (got {})", self.tol)));
        }
        Ok(())
    }

    fn r_grid(&self) -> Vec<f64> {
        let n = (self.r_max / self.r_step + 1e-9).floor() as usize;
        (0..=n).map(|k| k as f64 * self.r_step).collect()
    }

    fn phi_grid(&self) -> Vec<f64> {
        (0..self.phi_points).map(|k| std::f64::consts::TAU * k as f64 / self.phi_points as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Grid,
    Refined,
}

/// Deviation of the numerical optimum from a closed-form reference.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClosedFormComparison {
    pub reference: ClosedFormOptimum,
    #[serde(serialize_with = "f64_ext")]
    pub tau_reference: f64,
    pub r_tilde_rel_error: f64,
    pub phi_tilde_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    pub r_tilde_opt: f64,
    pub phi_tilde_opt: f64,
    #[serde(serialize_with = "f64_ext")]
    pub tau_opt: f64,
    pub method: Method,
    /// Objective is unbounded: the state is a pointer state of some bath.
    pub plateau: bool,
    pub grid_r_tilde: f64,
    pub grid_phi_tilde: f64,
    #[serde(serialize_with = "f64_ext")]
    pub grid_tau: f64,
    #[serde(serialize_with = "opt_f64_ext")]
    pub refine_rel_spread: Option<f64>,
    pub evaluations: usize,
    pub closed_form: Option<ClosedFormComparison>,
}

/// Decoherence time for bath `(r̃, φ̃)`.
pub fn tau_objective(m: &Moments, tau_r: f64, r_tilde: f64, phi_tilde: f64) -> Result<f64> {
    let res = ReservoirParams::squeezed_vacuum(tau_r, r_tilde, phi_tilde)?;
    Ok(decoherence_time_analytic(m, &res))
}

fn objective(m: &Moments, tau_r: f64, x: [f64; 2]) -> f64 {
    if x[0] < 0.0 || !x[0].is_finite() || !x[1].is_finite() {
        return f64::NEG_INFINITY;
    }
    tau_objective(m, tau_r, x[0], x[1]).unwrap_or(f64::NEG_INFINITY)
}

/// Grid search over `r̃ ∈ [0, r_max]`, `φ̃ ∈ [0, 2π)` and Nelder–Mead
/// refinement of the best cell.
pub fn maximize_tau(
    m: &Moments,
    tau_r: f64,
    cfg: &SearchConfig,
    reference: Option<ClosedFormOptimum>,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    if !(tau_r.is_finite() && tau_r > 0.0) {
        return Err(Error::InvalidInput(format!("relaxation time must be positive (got {tau_r})")));
    }
    let rs = cfg.r_grid();
    let phis = cfg.phi_grid();
    let rows: Vec<Vec<f64>> =
        rs.par_iter().map(|&r| phis.iter().map(|&p| objective(m, tau_r, [r, p])).collect()).collect();
    let mut evaluations = rs.len() * phis.len();

    // ascending r̃ then φ̃, strict improvement: ties go to the earlier point
    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > best.2 {
                best = (i, j, v);
            }
        }
    }
    let (gr, gp, gt) = (rs[best.0], phis[best.1], best.2);
    let mut out = OptimizationResult {
        r_tilde_opt: gr,
        phi_tilde_opt: gp,
        tau_opt: gt,
        method: Method::Grid,
        plateau: gt.is_infinite(),
        grid_r_tilde: gr,
        grid_phi_tilde: gp,
        grid_tau: gt,
        refine_rel_spread: None,
        evaluations,
        closed_form: None,
    };

    if !out.plateau {
        let f = |x: [f64; 2]| -objective(m, tau_r, x);
        let step = [cfg.r_step, std::f64::consts::TAU / cfg.phi_points as f64];
        let nm = nelder_mead(f, [gr, gp], step, cfg.tol, cfg.max_iter);
        evaluations += nm.evaluations;
        let tau = -nm.value;
        if tau.is_infinite() {
            out.plateau = true;
        }
        if tau >= gt {
            out.r_tilde_opt = nm.x[0];
            out.phi_tilde_opt = wrap_2pi(nm.x[1]);
            out.tau_opt = tau;
            out.method = Method::Refined;
        }
        out.refine_rel_spread = Some(nm.spread);
        out.evaluations = evaluations;
    }

    if let Some(cf) = reference {
        let tau_reference = tau_objective(m, tau_r, cf.r_tilde, cf.phi_tilde)?;
        out.closed_form = Some(ClosedFormComparison {
            reference: cf,
            tau_reference,
            r_tilde_rel_error: if cf.r_tilde > 0.0 {
                (out.r_tilde_opt - cf.r_tilde).abs() / cf.r_tilde
            } else {
                out.r_tilde_opt.abs()
            },
            phi_tilde_error: angle_diff(out.phi_tilde_opt, cf.phi_tilde).abs(),
        });
    }
    Ok(out)
}

/// Closed-form optimum wrapped as an [`OptimizationResult`].
pub fn closed_form_result(m: &Moments, tau_r: f64, cf: ClosedFormOptimum) -> Result<OptimizationResult> {
    let tau = tau_objective(m, tau_r, cf.r_tilde, cf.phi_tilde)?;
    Ok(OptimizationResult {
        r_tilde_opt: cf.r_tilde,
        phi_tilde_opt: cf.phi_tilde,
        tau_opt: tau,
        method: Method::ClosedForm,
        plateau: tau.is_infinite(),
        grid_r_tilde: f64::NAN,
        grid_phi_tilde: f64::NAN,
        grid_tau: f64::NAN,
        refine_rel_spread: None,
        evaluations: 1,
        closed_form: Some(ClosedFormComparison {
            reference: cf,
            tau_reference: tau,
            r_tilde_rel_error: 0.0,
            phi_tilde_error: 0.0,
        }),
    })
}

struct NmResult {
    x: [f64; 2],
    value: f64,
    spread: f64,
    evaluations: usize,
}

/// Minimise `f` with a two-dimensional Nelder–Mead simplex.
fn nelder_mead<F: Fn([f64; 2]) -> f64>(f: F, x0: [f64; 2], step: [f64; 2], tol: f64, max_iter: usize) -> NmResult {
    let mut pts = [x0, [x0[0] + step[0], x0[1]], [x0[0], x0[1] + step[1]]];
    let mut vals = pts.map(&f);
    let mut evaluations = 3;
    let mut spread = f64::INFINITY;
    for _ in 0..max_iter {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.map(|k| pts[k]);
        vals = idx.map(|k| vals[k]);
        let (lo, hi) = (vals[0], vals[2]);
        spread = if lo.is_finite() && hi.is_finite() { (hi - lo).abs() / lo.abs().max(f64::MIN_POSITIVE) } else { f64::INFINITY };
        let size = (pts[2][0] - pts[0][0]).abs().max((pts[2][1] - pts[0][1]).abs());
        if spread < tol || size < 1e-14 {
            break;
        }
        let c = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let along = |t: f64| [c[0] + t * (pts[2][0] - c[0]), c[1] + t * (pts[2][1] - c[1])];
        let xr = along(-1.0);
        let fr = f(xr);
        evaluations += 1;
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            evaluations += 1;
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
        } else {
            let (xc, fc) = if fr < vals[2] {
                let x = along(-0.5);
                (x, f(x))
            } else {
                let x = along(0.5);
                (x, f(x))
            };
            evaluations += 1;
            if fc < vals[2].min(fr) {
                pts[2] = xc;
                vals[2] = fc;
            } else {
                for k in 1..3 {
                    pts[k] = [(pts[0][0] + pts[k][0]) / 2.0, (pts[0][1] + pts[k][1]) / 2.0];
                    vals[k] = f(pts[k]);
                }
                evaluations += 2;
            }
        }
    }
    let k = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    NmResult { x: pts[k], value: vals[k], spread, evaluations }
}
