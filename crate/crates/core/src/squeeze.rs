//! Squeeze-parameter dynamics of the pumped, dispersively shifted mode.
//!
//! For the branch Hamiltonian `H = w a†a + ζ a†² + ζ* a² + ...` with
//! `ζ = κ e^{iη}`, the squeeze parameter `ε = r e^{iφ}` obeys
//!
//! ```text
//! ṙ = 2κ sin(η − φ),    φ̇ = −2w + 4κ coth(2r) cos(η − φ).
//! ```
//!
//! The numeric path integrates the Bogoliubov pair `(μ, ν̄)`, `ν̄ = ν*`,
//!
//! ```text
//! μ̇ = −i(w μ + 2ζ ν̄),    ν̄̇ = i(w ν̄ + 2ζ* μ),
//! ```
//!
//! with `cosh r = |μ|`, `e^{iφ} sinh r = μν/|μ|`, which is linear and regular
//! at `r = 0`.

use serde::{Deserialize, Serialize};

use crate::ode::Dopri5;
use crate::{Error, Result, C64, I};

/// Atomic branch: `ℓ = 1` shifts the cavity to `ω − χ`, `ℓ = 2` to `ω + χ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    One,
    Two,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::One, Branch::Two];

    /// `(−1)^ℓ`.
    pub fn sign(self) -> f64 {
        match self {
            Branch::One => -1.0,
            Branch::Two => 1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Branch::One => 1,
            Branch::Two => 2,
        }
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Branch::One),
            2 => Ok(Branch::Two),
            _ => Err(Error::InvalidInput(format!("branch must be 1 or 2, got {i}"))),
        }
    }
}

/// Drive parameters and timeline.
///
/// The pump (`κ`, `ϰ`) is on for `t0 ≤ t < t2`, the atom shifts the mode by
/// `±χ` for `t1 ≤ t < t2`, and `[t2, t_end]` is free evolution.
/// Phases are linear: `η(t) = eta_slope·t`, `ϖ(t) = varpi_slope·t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub omega: f64,
    pub omega0: f64,
    pub chi: f64,
    pub kappa: f64,
    pub eta_slope: f64,
    pub varkappa: f64,
    pub varpi_slope: f64,
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub t_end: f64,
}

impl DriveConfig {
    /// Resonant phases `η = −2ωt` and `ϖ = −ωt`, no linear drive.
    pub fn resonant(omega: f64, chi: f64, kappa: f64, t0: f64, t1: f64, t2: f64, t_end: f64) -> Self {
        Self {
            omega,
            omega0: 0.0,
            chi,
            kappa,
            eta_slope: -2.0 * omega,
            varkappa: 0.0,
            varpi_slope: -omega,
            t0,
            t1,
            t2,
            t_end,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.omega,
            self.omega0,
            self.chi,
            self.kappa,
            self.eta_slope,
            self.varkappa,
            self.varpi_slope,
            self.t0,
            self.t1,
            self.t2,
            self.t_end,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("drive parameters must be finite".into()));
        }
        if !(self.t0 <= self.t1 && self.t1 <= self.t2 && self.t2 <= self.t_end) {
            return Err(Error::InvalidInput(format!(
                "timeline must satisfy t0 <= t1 <= t2 <= t_end (got {}, {}, {}, {})",
                self.t0, self.t1, self.t2, self.t_end
            )));
        }
        if self.chi < 0.0 || self.kappa < 0.0 || self.varkappa < 0.0 {
            return Err(Error::InvalidInput("chi, kappa and varkappa must be non-negative".into()));
        }
        Ok(())
    }

    pub fn is_resonant(&self) -> bool {
        (self.eta_slope + 2.0 * self.omega).abs() <= 1e-12 * self.omega.abs().max(1e-300)
    }

    pub fn eta(&self, t: f64) -> f64 {
        self.eta_slope * t
    }

    /// `(−1)^ℓ 2κ/χ`.
    pub fn coupling(&self, branch: Branch) -> f64 {
        branch.sign() * 2.0 * self.kappa / self.chi
    }

    /// Interval boundaries where the Hamiltonian switches.
    pub fn breakpoints(&self) -> [f64; 3] {
        [self.t0, self.t1, self.t2]
    }

    /// Constant-flag drive valid on the open interval between two
    /// consecutive breakpoints containing `(ta + tb)/2`. `branch = None`
    /// means the atom is absent.
    pub fn piece(&self, branch: Option<Branch>, ta: f64, tb: f64) -> PieceDrive {
        let tm = 0.5 * (ta + tb);
        let pump = tm >= self.t0 && tm < self.t2;
        let atom = tm >= self.t1 && tm < self.t2;
        let shift = match branch {
            Some(b) if atom => b.sign() * self.chi,
            _ => 0.0,
        };
        PieceDrive {
            w: self.omega + shift,
            kappa: if pump { self.kappa } else { 0.0 },
            eta_slope: self.eta_slope,
            varkappa: if pump { self.varkappa } else { 0.0 },
            varpi_slope: self.varpi_slope,
        }
    }

    /// Split `[ta, tb]` (either direction) at interior breakpoints.
    pub fn split(&self, ta: f64, tb: f64) -> Vec<(f64, f64)> {
        let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        let mut cuts: Vec<f64> = self.breakpoints().into_iter().filter(|&b| b > lo && b < hi).collect();
        cuts.dedup();
        let mut pts = vec![ta];
        if ta <= tb {
            pts.extend(cuts);
        } else {
            pts.extend(cuts.into_iter().rev());
        }
        pts.push(tb);
        pts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| a != b).collect()
    }
}

/// Drive with all switches frozen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PieceDrive {
    /// Branch frequency `ω_ℓ`.
    pub w: f64,
    pub kappa: f64,
    pub eta_slope: f64,
    pub varkappa: f64,
    pub varpi_slope: f64,
}

impl PieceDrive {
    pub fn zeta(&self, t: f64) -> C64 {
        C64::from_polar(self.kappa, self.eta_slope * t)
    }

    pub fn xi(&self, t: f64) -> C64 {
        C64::from_polar(self.varkappa, self.varpi_slope * t)
    }

    /// Right-hand side of the Bogoliubov pair `(μ, ν̄)`.
    #[inline]
    pub fn bogoliubov_rhs(&self, t: f64, mu: C64, nubar: C64) -> (C64, C64) {
        let z = self.zeta(t);
        (-I * (mu * self.w + z * nubar * 2.0), I * (nubar * self.w + z.conj() * mu * 2.0))
    }
}

/// Bogoliubov pair with `|μ|² − |ν|² = 1`; `ν` (not `ν̄`) is stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bogoliubov {
    pub mu: C64,
    pub nu: C64,
}

impl Bogoliubov {
    pub fn identity() -> Self {
        Self { mu: C64::new(1.0, 0.0), nu: C64::new(0.0, 0.0) }
    }

    pub fn from_squeeze(r: f64, phi: f64) -> Self {
        Self { mu: C64::new(r.cosh(), 0.0), nu: C64::from_polar(r.sinh(), phi) }
    }

    pub fn r(&self) -> f64 {
        self.nu.norm().asinh()
    }

    pub fn phi(&self) -> f64 {
        (self.mu * self.nu).arg()
    }

    pub fn cosh_r(&self) -> f64 {
        self.mu.norm()
    }

    /// `e^{iφ} sinh r`.
    pub fn sinh_r_phase(&self) -> C64 {
        self.mu * self.nu / self.mu.norm()
    }

    /// `e^{iφ} tanh r`.
    pub fn tanh_r_phase(&self) -> C64 {
        self.mu * self.nu / self.mu.norm_sqr()
    }

    pub fn epsilon(&self) -> C64 {
        let r = self.r();
        if r == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::from_polar(r, self.phi())
        }
    }

    /// `cosh 2r`.
    pub fn cosh_2r(&self) -> f64 {
        self.mu.norm_sqr() + self.nu.norm_sqr()
    }

    /// `cos(φ − η) sinh 2r = 2 Re(e^{−iη} μν)`.
    pub fn c_resonant(&self, eta: f64) -> f64 {
        2.0 * (C64::from_polar(1.0, -eta) * self.mu * self.nu).re
    }

    /// `cosh 2r + P cos(φ − η) sinh 2r`.
    pub fn c_dispersive(&self, p: f64, eta: f64) -> f64 {
        self.cosh_2r() + p * self.c_resonant(eta)
    }

    pub(crate) fn renormalize(&mut self) {
        let d = self.mu.norm_sqr() - self.nu.norm_sqr();
        if d > 0.0 {
            let s = 1.0 / d.sqrt();
            self.mu *= s;
            self.nu *= s;
        }
    }
}

/// One trajectory point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeSample {
    pub t: f64,
    pub r: f64,
    pub phi: f64,
    pub bogoliubov: Bogoliubov,
}

/// Sampled `r(t)`, `φ(t)` for one branch (`None`: atom absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezeTrajectory {
    pub branch: Option<Branch>,
    pub samples: Vec<SqueezeSample>,
}

impl SqueezeTrajectory {
    pub fn last(&self) -> &SqueezeSample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn span(&self) -> (f64, f64) {
        (self.samples[0].t, self.last().t)
    }

    /// Constant of motion of the interval containing each sample: `𝒞_i` when
    /// the atom is absent, `𝒞_1` when it is present.
    pub fn constants(&self, cfg: &DriveConfig) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| {
                let eta = cfg.eta(s.t);
                match self.branch {
                    Some(b) if s.t >= cfg.t1 && s.t <= cfg.t2 && cfg.chi > 0.0 => {
                        s.bogoliubov.c_dispersive(cfg.coupling(b), eta)
                    }
                    _ => s.bogoliubov.c_resonant(eta),
                }
            })
            .collect()
    }
}

/// Coupling classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeClass {
    Weak,
    Critical,
    Strong,
    Resonant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingRegime {
    /// `(−1)^ℓ 2κ/χ`; `None` when `χ = 0`.
    pub p_ell: Option<f64>,
    pub class: RegimeClass,
}

pub fn classify_regime(cfg: &DriveConfig, branch: Branch) -> CouplingRegime {
    if cfg.chi == 0.0 {
        return CouplingRegime { p_ell: None, class: RegimeClass::Resonant };
    }
    let p = cfg.coupling(branch);
    let class = if (p.abs() - 1.0).abs() <= 1e-12 {
        RegimeClass::Critical
    } else if p.abs() < 1.0 {
        RegimeClass::Weak
    } else {
        RegimeClass::Strong
    };
    CouplingRegime { p_ell: Some(p), class }
}

/// Length of `[a, b] ∩ [lo, hi)`.
fn overlap(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    (b.min(hi) - a.max(lo)).max(0.0)
}

/// Closed-form squeezing on an atom-free resonant interval.
///
/// With `ψ = φ − η` and the conserved `C = cos ψ sinh 2r`,
/// `cosh 2r(t) = √(1 + C²) cosh(s₀ + u)` where `u = 4∫κ dt` and
/// `sinh s₀ = −sinh(2r_i) sin(ψ_i)/√(1 + C²)` fixes the branch by the sign
/// of `ṙ`. The phase follows from `cos ψ = C/sinh 2r` and
/// `sin ψ = −√(1 + C²) sinh(s₀ + u)/sinh 2r`.
pub fn resonant_solution(cfg: &DriveConfig, r_i: f64, phi_i: f64, t_i: f64, t: f64) -> Result<(f64, f64)> {
    if !cfg.is_resonant() {
        return Err(Error::NotResonant { eta_slope: cfg.eta_slope, omega: cfg.omega });
    }
    if r_i < 0.0 || !r_i.is_finite() {
        return Err(Error::InvalidInput(format!("r_i must be non-negative, got {r_i}")));
    }
    if t < t_i {
        return Err(Error::InvalidInput("resonant_solution requires t >= t_i".into()));
    }
    if cfg.chi > 0.0 && overlap(t_i, t, cfg.t1, cfg.t2) > 0.0 {
        return Err(Error::InvalidInput("atom present inside the requested resonant interval".into()));
    }
    let u = 4.0 * cfg.kappa * overlap(t_i, t, cfg.t0, cfg.t2);
    let psi_i = phi_i - cfg.eta(t_i);
    let sh_i = (2.0 * r_i).sinh();
    let c = psi_i.cos() * sh_i;
    let big_r = (1.0 + c * c).sqrt();
    let s0 = (-sh_i * psi_i.sin() / big_r).asinh();
    let arg = s0 + u;
    let x = big_r * arg.cosh();
    if x < 1.0 - 1e-12 {
        return Err(Error::Inconsistent(format!("cosh(2r) = {x} < 1 in resonant solution")));
    }
    let x = x.max(1.0);
    let r = 0.5 * x.acosh();
    let sh = (2.0 * r).sinh();
    let psi = if sh == 0.0 { -std::f64::consts::FRAC_PI_2 } else { (-big_r * arg.sinh() / sh).atan2(c / sh) };
    Ok((r, psi + cfg.eta(t)))
}

/// Weak-coupling closed form on the atom interval `[t1, t2]`.
///
/// `X = cosh 2r` obeys `Ẍ = −ν²(X − X₀)` with `ν = 2χ√(1 − P²)`,
/// `X₀ = 𝒞₁/(1 − P²)` and amplitude `A = |P|√(𝒞₁² − (1 − P²))/(1 − P²)`,
/// so `X(t) = X₀ − A sin(ϑ₀ − ν(t − t1))`. The phase follows from
/// `cos ψ = (𝒞₁ − X)/(P sinh 2r)` and `sin ψ = −Ẋ/(4κ sinh 2r)`; the sign of
/// `Ẋ` selects the branch of the inverse cosine.
pub fn dispersive_weak_solution(cfg: &DriveConfig, branch: Branch, r1: f64, phi1: f64, t: f64) -> Result<(f64, f64)> {
    Ok(dispersive_weak_detail(cfg, branch, r1, phi1, t)?.into())
}

/// Full output of the weak-coupling closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakSolution {
    pub r: f64,
    pub phi: f64,
    pub cosh_2r: f64,
    pub c1: f64,
    /// Sign of `sin(φ − η)` selecting the inverse-cosine branch.
    pub branch_sign: f64,
}

impl From<WeakSolution> for (f64, f64) {
    fn from(w: WeakSolution) -> Self {
        (w.r, w.phi)
    }
}

pub fn dispersive_weak_detail(cfg: &DriveConfig, branch: Branch, r1: f64, phi1: f64, t: f64) -> Result<WeakSolution> {
    if !cfg.is_resonant() {
        return Err(Error::NotResonant { eta_slope: cfg.eta_slope, omega: cfg.omega });
    }
    if cfg.chi <= 0.0 {
        return Err(Error::InvalidInput("weak-coupling solution needs chi > 0".into()));
    }
    if t < cfg.t1 || t > cfg.t2 {
        return Err(Error::InvalidInput(format!("t = {t} outside the atom interval [{}, {}]", cfg.t1, cfg.t2)));
    }
    let p = cfg.coupling(branch);
    if p.abs() >= 1.0 {
        return Err(Error::InvalidInput(format!("weak-coupling solution needs |P| < 1, got {p}")));
    }
    let dt = t - cfg.t1;
    let psi1 = phi1 - cfg.eta(cfg.t1);
    let x1 = (2.0 * r1).cosh();
    let sh1 = (2.0 * r1).sinh();
    let c1 = x1 + p * psi1.cos() * sh1;
    let q = 1.0 - p * p;
    let bound = q.sqrt();
    if cfg.kappa == 0.0 {
        let psi = psi1 - 2.0 * branch.sign() * cfg.chi * dt;
        return Ok(WeakSolution { r: r1, phi: psi + cfg.eta(t), cosh_2r: x1, c1, branch_sign: psi.sin().signum() });
    }
    if c1 - bound <= 1e-12 * bound {
        return Err(Error::UnsupportedBranch { c1, bound });
    }
    let x0 = c1 / q;
    let amp = p.abs() * (c1 * c1 - q).sqrt() / q;
    let nu = 2.0 * cfg.chi * q.sqrt();
    let xdot1 = -4.0 * cfg.kappa * sh1 * psi1.sin();
    let theta0 = ((x0 - x1) / amp).atan2(xdot1 / (amp * nu));
    let arg = theta0 - nu * dt;
    let x = (x0 - amp * arg.sin()).max(1.0);
    let xdot = amp * nu * arg.cos();
    let r = 0.5 * x.acosh();
    let sh = (2.0 * r).sinh();
    let (sin_psi, cos_psi) = if sh == 0.0 { (-1.0, 0.0) } else { (-xdot / (4.0 * cfg.kappa * sh), (c1 - x) / (p * sh)) };
    let psi = sin_psi.atan2(cos_psi);
    Ok(WeakSolution { r, phi: psi + cfg.eta(t), cosh_2r: x, c1, branch_sign: if sin_psi >= 0.0 { 1.0 } else { -1.0 } })
}

/// Integrator settings for the characteristic equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicOptions {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for CharacteristicOptions {
    fn default() -> Self {
        Self { rtol: 1e-13, atol: 1e-15 }
    }
}

/// Integrate the Bogoliubov pair through `times` (monotone, either direction),
/// splitting at the switching instants. `branch = None`: atom absent.
pub fn integrate_bogoliubov(
    cfg: &DriveConfig,
    branch: Option<Branch>,
    start: Bogoliubov,
    times: &[f64],
    opts: CharacteristicOptions,
) -> Result<SqueezeTrajectory> {
    cfg.validate()?;
    if times.is_empty() {
        return Err(Error::InvalidInput("empty time span".into()));
    }
    let dir_ok = times.windows(2).all(|w| w[1] >= w[0]) || times.windows(2).all(|w| w[1] <= w[0]);
    if !dir_ok {
        return Err(Error::InvalidInput("sample times must be monotone".into()));
    }
    let solver = Dopri5::new(opts.rtol, opts.atol);
    let mut y = [start.mu, start.nu.conj()];
    let mut samples = Vec::with_capacity(times.len());
    let push = |samples: &mut Vec<SqueezeSample>, t: f64, y: &[C64; 2]| {
        let b = Bogoliubov { mu: y[0], nu: y[1].conj() };
        samples.push(SqueezeSample { t, r: b.r(), phi: b.phi(), bogoliubov: b });
    };
    push(&mut samples, times[0], &y);
    for w in times.windows(2) {
        for (ta, tb) in cfg.split(w[0], w[1]) {
            let d = cfg.piece(branch, ta, tb);
            solver.integrate_with(
                ta,
                tb,
                &mut y,
                |t, y, dy| {
                    let (a, b) = d.bogoliubov_rhs(t, y[0], y[1]);
                    dy[0] = a;
                    dy[1] = b;
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
        push(&mut samples, w[1], &y);
    }
    Ok(SqueezeTrajectory { branch, samples })
}

/// Integrate from `(r, φ)` at `times[0]` through all `times`.
pub fn integrate_characteristic(
    cfg: &DriveConfig,
    branch: Option<Branch>,
    initial: (f64, f64),
    times: &[f64],
) -> Result<SqueezeTrajectory> {
    integrate_bogoliubov(cfg, branch, Bogoliubov::from_squeeze(initial.0, initial.1), times, CharacteristicOptions::default())
}

/// Analytic `(r, φ)` at `t` for a branch starting from vacuum at `t0`:
/// resonant up to `t1`, weak-coupling closed form on `[t1, t2]`, resonant
/// free evolution after `t2`.
pub fn analytic_branch_state(cfg: &DriveConfig, branch: Branch, t: f64) -> Result<(f64, f64)> {
    let t = t.max(cfg.t0);
    let phi0 = cfg.eta(cfg.t0) - std::f64::consts::FRAC_PI_2;
    if t <= cfg.t1 || cfg.chi == 0.0 {
        return resonant_solution(&DriveConfig { chi: 0.0, ..*cfg }, 0.0, phi0, cfg.t0, t);
    }
    let (r1, phi1) = resonant_solution(&DriveConfig { chi: 0.0, ..*cfg }, 0.0, phi0, cfg.t0, cfg.t1)?;
    if t <= cfg.t2 {
        return dispersive_weak_solution(cfg, branch, r1, phi1, t);
    }
    let (r2, phi2) = dispersive_weak_solution(cfg, branch, r1, phi1, cfg.t2)?;
    resonant_solution(&DriveConfig { chi: 0.0, ..*cfg }, r2, phi2, cfg.t2, t)
}
