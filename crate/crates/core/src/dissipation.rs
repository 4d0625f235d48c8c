//! Cavity damping by a squeezed-vacuum reservoir.
//!
//! The bath is described by `N = sinh²r̃` and `M = −e^{iφ̃} sinh(2r̃)/2`. The
//! master equation is written in the frame rotating at the cavity frequency,
//! with state and bath phases referred to the same frame:
//!
//! ```text
//! ρ̇ = γ(N+1)[aρa† − ½{a†a,ρ}] + γN[a†ρa − ½{aa†,ρ}]
//!   + γM[a†ρa† − ½{a†²,ρ}] + γM*[aρa − ½{a²,ρ}]
//! ```
//!
//! With this sign of the `M` terms the initial purity loss of a pure state,
//! `dTrρ²/dt = 2Tr(ρρ̇)`, equals `−1/τ` with
//!
//! ```text
//! τ = τ_R / (2|(2N+1)(⟨a†⟩⟨a⟩ − ⟨a†a⟩) + 2Re[M(⟨a†⟩² − ⟨a†²⟩)] − N|)
//! ```
//!
//! identically, and the stationary state has `⟨a†a⟩ = N`, `⟨a²⟩ = −M`.
//! Operators are the truncated matrices, so the generator is exactly
//! trace preserving on the truncated space.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::fock::{DensityMatrix, FockState, Moments};
use crate::ode::{Dopri5, OdeStats};
use crate::serde_ext::f64_ext;
use crate::{Error, Result, C64, I};

/// Absolute threshold on the dimensionless purity-loss rate `τ_R·|dTrρ²/dt|`
/// below which a state is reported as a pointer state.
pub const POINTER_RATE_TOL: f64 = 1e-10;

/// Relative slack allowed in `|M|² ≤ N(N+1)`.
const RESERVOIR_TOL: f64 = 1e-12;

/// Zero-temperature squeezed-vacuum bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReservoirParams {
    tau_r: f64,
    n: f64,
    m: C64,
    squeeze: Option<(f64, f64)>,
}

impl ReservoirParams {
    /// Pure squeezed vacuum with squeeze factor `r_tilde ≥ 0` and direction `phi_tilde`.
    pub fn squeezed_vacuum(tau_r: f64, r_tilde: f64, phi_tilde: f64) -> Result<Self> {
        check_tau(tau_r)?;
        if !(r_tilde.is_finite() && r_tilde >= 0.0) {
            return Err(Error::InvalidInput(format!("reservoir squeeze factor must be >= 0 (got {r_tilde})")));
        }
        if !phi_tilde.is_finite() {
            return Err(Error::InvalidInput("reservoir squeeze angle must be finite".into()));
        }
        let n = r_tilde.sinh().powi(2);
        // reduce first so that φ̃ and φ̃ + 2π give identical parameters
        let m = -(I * crate::wrap_2pi(phi_tilde)).exp() * (0.5 * (2.0 * r_tilde).sinh());
        Ok(Self { tau_r, n, m, squeeze: Some((r_tilde, phi_tilde)) })
    }

    /// Plain vacuum bath.
    pub fn vacuum(tau_r: f64) -> Result<Self> {
        Self::squeezed_vacuum(tau_r, 0.0, 0.0)
    }

    /// General Gaussian bath from its moments; requires `|M|² ≤ N(N+1)`.
    pub fn from_moments(tau_r: f64, n: f64, m: C64) -> Result<Self> {
        check_tau(tau_r)?;
        if !(n.is_finite() && n >= 0.0) || !(m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::InvalidInput(format!("reservoir moments must be finite with N >= 0 (N = {n})")));
        }
        let bound = n * (n + 1.0);
        let m_abs2 = m.norm_sqr();
        if m_abs2 > bound * (1.0 + RESERVOIR_TOL) + RESERVOIR_TOL {
            return Err(Error::InvalidReservoir { m_abs2, bound });
        }
        Ok(Self { tau_r, n, m, squeeze: None })
    }

    pub fn tau_r(&self) -> f64 {
        self.tau_r
    }

    pub fn gamma(&self) -> f64 {
        1.0 / self.tau_r
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn m(&self) -> C64 {
        self.m
    }

    /// `(r̃, φ̃)` when constructed as a pure squeezed vacuum.
    pub fn squeeze(&self) -> Option<(f64, f64)> {
        self.squeeze
    }

    /// `|M|² = N(N+1)` to rounding.
    pub fn is_minimal(&self) -> bool {
        let bound = self.n * (self.n + 1.0);
        (bound - self.m.norm_sqr()).abs() <= 1e-10 * (1.0 + bound)
    }

    /// Stationary `(⟨a†a⟩, ⟨a²⟩)`.
    pub fn steady_moments(&self) -> (f64, C64) {
        (self.n, -self.m)
    }
}

fn check_tau(tau_r: f64) -> Result<()> {
    if tau_r.is_finite() && tau_r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("relaxation time must be positive (got {tau_r})")))
    }
}

/// Column-major action of the generator on a flattened `d×d` matrix.
struct Generator {
    d: usize,
    down: f64,
    up: f64,
    gm: C64,
    sq: Vec<f64>,
}

impl Generator {
    fn new(d: usize, res: &ReservoirParams) -> Self {
        let g = res.gamma();
        Self {
            d,
            down: g * (res.n + 1.0),
            up: g * res.n,
            gm: res.m * g,
            sq: (0..=d + 1).map(|k| (k as f64).sqrt()).collect(),
        }
    }

    fn apply(&self, rho: &[C64], out: &mut [C64]) {
        let d = self.d;
        let s = &self.sq;
        let at = |i: usize, j: usize| rho[i + j * d];
        // diagonal of the truncated a a†
        let e = |k: usize| if k + 1 < d { (k + 1) as f64 } else { 0.0 };
        let gmc = self.gm.conj();
        for j in 0..d {
            for i in 0..d {
                let r = at(i, j);
                let mut v = C64::new(0.0, 0.0);

                let mut down = -0.5 * (i + j) as f64 * r;
                if i + 1 < d && j + 1 < d {
                    down += at(i + 1, j + 1) * (s[i + 1] * s[j + 1]);
                }
                v += down * self.down;

                if self.up != 0.0 {
                    let mut up = -0.5 * (e(i) + e(j)) * r;
                    if i >= 1 && j >= 1 {
                        up += at(i - 1, j - 1) * (s[i] * s[j]);
                    }
                    v += up * self.up;
                }

                if self.gm != C64::new(0.0, 0.0) {
                    let mut t = C64::new(0.0, 0.0);
                    if i >= 1 && j + 1 < d {
                        t += at(i - 1, j + 1) * (s[i] * s[j + 1]);
                    }
                    if i >= 2 {
                        t -= at(i - 2, j) * (0.5 * s[i] * s[i - 1]);
                    }
                    if j + 2 < d {
                        t -= at(i, j + 2) * (0.5 * s[j + 1] * s[j + 2]);
                    }
                    v += t * self.gm;

                    let mut t = C64::new(0.0, 0.0);
                    if i + 1 < d && j >= 1 {
                        t += at(i + 1, j - 1) * (s[i + 1] * s[j]);
                    }
                    if i + 2 < d {
                        t -= at(i + 2, j) * (0.5 * s[i + 1] * s[i + 2]);
                    }
                    if j >= 2 {
                        t -= at(i, j - 2) * (0.5 * s[j - 1] * s[j]);
                    }
                    v += t * gmc;
                }
                out[i + j * d] = v;
            }
        }
    }
}

/// `ρ̇` for the squeezed-vacuum bath.
pub fn lindblad_rhs(rho: &DensityMatrix, res: &ReservoirParams) -> Result<DMatrix<C64>> {
    let d = rho.n_max();
    let gen = Generator::new(d, res);
    let mut out = DMatrix::<C64>::zeros(d, d);
    gen.apply(rho.matrix().as_slice(), out.as_mut_slice());
    Ok(out)
}

/// Step control and sampling for [`evolve_master`].
#[derive(Debug, Clone)]
pub struct MasterOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Number of points of the uniform purity grid (including both ends).
    pub grid_points: usize,
    /// Keep every `snapshot_stride`-th grid state (0 keeps only the last).
    pub snapshot_stride: usize,
    /// Largest population tolerated in the top Fock levels.
    pub tail_tol: f64,
    /// Compute the smallest eigenvalue at every grid point.
    pub check_positivity: bool,
}

impl Default for MasterOptions {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-13, grid_points: 101, snapshot_stride: 0, tail_tol: 1e-8, check_positivity: true }
    }
}

/// Purity, trace and positivity on a uniform time grid.
#[derive(Debug, Clone)]
pub struct MasterTrajectory {
    pub times: Vec<f64>,
    pub purity: Vec<f64>,
    pub trace: Vec<f64>,
    pub min_eigenvalue: Vec<f64>,
    pub snapshots: Vec<(f64, DensityMatrix)>,
    pub final_state: DensityMatrix,
    pub stats: OdeStats,
}

const TRACE_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = 1e-8;

/// Integrate the master equation from `rho0` over `[0, horizon]`.
pub fn evolve_master(
    rho0: &DensityMatrix,
    res: &ReservoirParams,
    horizon: f64,
    opts: &MasterOptions,
) -> Result<MasterTrajectory> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidInput(format!("horizon must be positive (got {horizon})")));
    }
    if opts.grid_points < 2 {
        return Err(Error::InvalidInput("purity grid needs at least two points".into()));
    }
    let d = rho0.n_max();
    let gen = Generator::new(d, res);
    let times: Vec<f64> = (0..opts.grid_points).map(|k| horizon * k as f64 / (opts.grid_points - 1) as f64).collect();
    let solver = Dopri5::new(opts.rtol, opts.atol);
    let (states, stats) = solver.integrate_sampled(
        &times,
        rho0.matrix().as_slice(),
        |_, y, dy| gen.apply(y, dy),
        |_, y| {
            hermitize(y, d);
            false
        },
    )?;

    let mut traj = MasterTrajectory {
        times: times.clone(),
        purity: Vec::with_capacity(times.len()),
        trace: Vec::with_capacity(times.len()),
        min_eigenvalue: Vec::new(),
        snapshots: Vec::new(),
        final_state: rho0.clone(),
        stats,
    };
    let last = states.len() - 1;
    for (k, (t, y)) in times.iter().zip(states).enumerate() {
        let rho = DensityMatrix::from_matrix_unchecked(DMatrix::from_vec(d, d, y));
        let tr = rho.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Integration { t: *t, reason: format!("trace drifted to {tr:.12}") });
        }
        let tail = rho.tail();
        if tail > opts.tail_tol {
            return Err(Error::Truncation { tail, tol: opts.tail_tol, n_max: d });
        }
        if opts.check_positivity {
            let ev = rho.min_eigenvalue();
            if ev < -POSITIVITY_TOL {
                return Err(Error::Positivity { min_eig: ev, t: *t });
            }
            traj.min_eigenvalue.push(ev);
        }
        traj.purity.push(rho.purity());
        traj.trace.push(tr);
        let keep = opts.snapshot_stride > 0 && k % opts.snapshot_stride == 0;
        if k == last {
            if keep {
                traj.snapshots.push((*t, rho.clone()));
            }
            traj.final_state = rho;
        } else if keep {
            traj.snapshots.push((*t, rho));
        }
    }
    Ok(traj)
}

fn hermitize(y: &mut [C64], d: usize) {
    for j in 0..d {
        y[j + j * d].im = 0.0;
        for i in j + 1..d {
            let a = y[i + j * d];
            let b = y[j + i * d];
            let h = (a + b.conj()) * 0.5;
            y[i + j * d] = h;
            y[j + i * d] = h.conj();
        }
    }
}

/// Initial `dTrρ²/dt` of a pure state from its moments.
pub fn purity_rate(m: &Moments, res: &ReservoirParams) -> f64 {
    2.0 * res.gamma() * defect_kernel(m, res)
}

/// The expression inside the absolute value of the decoherence-time formula.
fn defect_kernel(m: &Moments, res: &ReservoirParams) -> f64 {
    let coherent = m.a.norm_sqr() - m.n;
    let anomalous = (m.a * m.a - m.a2).conj();
    (2.0 * res.n + 1.0) * coherent + 2.0 * (res.m * anomalous).re - res.n
}

/// Decoherence time from the first and second moments of a pure state;
/// `+∞` for a pointer state.
pub fn decoherence_time_analytic(m: &Moments, res: &ReservoirParams) -> f64 {
    let k = defect_kernel(m, res);
    if k.abs() <= POINTER_RATE_TOL {
        f64::INFINITY
    } else {
        res.tau_r / (2.0 * k.abs())
    }
}

/// Decoherence time from the generator: `τ = −1/(2Tr(ρ₀ρ̇₀))`.
pub fn decoherence_time_numeric(rho0: &DensityMatrix, res: &ReservoirParams) -> Result<f64> {
    let p = rho0.purity();
    if (p - 1.0).abs() > 1e-8 {
        return Err(Error::NotPure { purity: p });
    }
    let rate = purity_rate_numeric(rho0, res)?;
    if (rate * res.tau_r).abs() <= POINTER_RATE_TOL {
        return Ok(f64::INFINITY);
    }
    if rate > 0.0 {
        return Err(Error::Inconsistent(format!("purity increases at rate {rate:.3e} for a pure state")));
    }
    Ok(-1.0 / rate)
}

/// `2Tr(ρ·L(ρ))`.
pub fn purity_rate_numeric(rho: &DensityMatrix, res: &ReservoirParams) -> Result<f64> {
    let drho = lindblad_rhs(rho, res)?;
    let m = rho.matrix();
    let d = rho.n_max();
    // Tr(ρ X) = Σ_ij ρ_ji X_ij
    let mut s = C64::new(0.0, 0.0);
    for j in 0..d {
        for i in 0..d {
            s += m[(j, i)] * drho[(i, j)];
        }
    }
    Ok(2.0 * s.re)
}

/// Moments of `S(ε)(c₁|α⟩ + c₂|−α⟩)`, normalized.
pub fn squeezed_cat_moments(alpha: C64, c1: C64, c2: C64, eps: C64) -> Result<Moments> {
    let s = (-2.0 * alpha.norm_sqr()).exp();
    let norm = c1.norm_sqr() + c2.norm_sqr() + 2.0 * s * (c1.conj() * c2).re;
    if !(norm > 1e-300) {
        return Err(Error::DegenerateState);
    }
    let a0 = alpha * (c1.norm_sqr() - c2.norm_sqr() + s * (c2.conj() * c1 - c1.conj() * c2)) / norm;
    let n0 = alpha.norm_sqr() * (c1.norm_sqr() + c2.norm_sqr() - 2.0 * s * (c1.conj() * c2).re) / norm;
    let a20 = alpha * alpha;
    let r = eps.norm();
    let mu = r.cosh();
    let nu = if r == 0.0 { C64::new(0.0, 0.0) } else { eps / r * r.sinh() };
    Ok(Moments {
        a: a0 * mu + nu * a0.conj(),
        n: mu * mu * n0 + nu.norm_sqr() * (n0 + 1.0) + 2.0 * (nu.conj() * a20 * mu).re,
        a2: a20 * mu * mu + nu * nu * a20.conj() + nu * mu * (2.0 * n0 + 1.0),
    })
}

/// Decoherence analysis of one prepared state.
#[derive(Debug, Clone, Serialize)]
pub struct DecoherenceReport {
    #[serde(serialize_with = "f64_ext")]
    pub tau_analytic: f64,
    #[serde(serialize_with = "f64_ext")]
    pub tau_numeric: f64,
    /// `|τ_num − τ_an|/τ_an`; zero when both are infinite.
    #[serde(serialize_with = "f64_ext")]
    pub relative_deviation: f64,
    pub pointer_state: bool,
    pub moments: Moments,
    pub reservoir_n: f64,
    pub reservoir_m: C64,
    pub minimal_reservoir: bool,
    pub purity_times: Vec<f64>,
    pub purity: Vec<f64>,
}

/// Both decoherence times and, for a positive `horizon`, the purity curve.
pub fn decoherence_report(
    psi: &FockState,
    res: &ReservoirParams,
    horizon: Option<f64>,
    opts: &MasterOptions,
) -> Result<DecoherenceReport> {
    let moments = psi.moments();
    let rho = psi.to_density();
    let tau_analytic = decoherence_time_analytic(&moments, res);
    let tau_numeric = decoherence_time_numeric(&rho, res)?;
    let relative_deviation = match (tau_analytic.is_finite(), tau_numeric.is_finite()) {
        (false, false) => 0.0,
        (true, true) => (tau_numeric - tau_analytic).abs() / tau_analytic,
        _ => f64::INFINITY,
    };
    let (purity_times, purity) = match horizon {
        Some(h) => {
            let traj = evolve_master(&rho, res, h, opts)?;
            (traj.times, traj.purity)
        }
        None => (Vec::new(), Vec::new()),
    };
    Ok(DecoherenceReport {
        tau_analytic,
        tau_numeric,
        relative_deviation,
        pointer_state: !tau_analytic.is_finite(),
        moments,
        reservoir_n: res.n,
        reservoir_m: res.m,
        minimal_reservoir: res.is_minimal(),
        purity_times,
        purity,
    })
}

/// Prepared-state data entering the large-amplitude comparison.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticInput {
    /// Real coherent amplitude of the initial state.
    pub alpha: f64,
    /// Squeeze factor of the prepared components.
    pub r: f64,
    pub c1: C64,
    pub c2: C64,
    /// Moments of the prepared superposition.
    pub moments: Moments,
    /// Phase-space distance between the components.
    pub distance: f64,
    pub tau_r: f64,
}

/// Large-amplitude estimates against exact values and unsqueezed baselines.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    pub r_tilde: f64,
    pub phi_tilde: f64,
    #[serde(serialize_with = "f64_ext")]
    pub tau: f64,
    pub tau_estimate: f64,
    pub mean_n: f64,
    pub mean_n_estimate: f64,
    pub distance: f64,
    pub distance_estimate: f64,
    pub mean_n_ns: f64,
    pub distance_ns: f64,
    /// Unsqueezed cat under its own optimal squeezed bath.
    #[serde(serialize_with = "f64_ext")]
    pub tau_i: f64,
    /// Unsqueezed cat under the plain vacuum bath.
    #[serde(serialize_with = "f64_ext")]
    pub tau_ii: f64,
    pub ratio_mean_n: f64,
    /// `(D/2)²/α²`: intensity of the component centres.
    pub ratio_centre_intensity: f64,
    pub ratio_distance: f64,
    pub ratio_tau_i: f64,
    pub ratio_tau_ii: f64,
    pub expected_ratio_mean_n: f64,
    pub expected_ratio_distance: f64,
    pub expected_ratio_tau_ii: f64,
}

/// Evaluate the prepared state under the case-A optimal bath and compare with
/// the unsqueezed cat `c₁|α⟩ + c₂|−α⟩`.
pub fn asymptotic_report(inp: &AsymptoticInput) -> Result<AsymptoticReport> {
    use crate::optimizer::{optimal_reservoir_closed_form, ReservoirCase};
    let a = inp.alpha;
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidInput(format!("alpha must be positive (got {a})")));
    }
    let opt = optimal_reservoir_closed_form(a, inp.r, ReservoirCase::A)?;
    let bath = ReservoirParams::squeezed_vacuum(inp.tau_r, opt.r_tilde, opt.phi_tilde)?;
    let tau = decoherence_time_analytic(&inp.moments, &bath);

    let ns = squeezed_cat_moments(C64::new(a, 0.0), inp.c1, inp.c2, C64::new(0.0, 0.0))?;
    let opt_ns = optimal_reservoir_closed_form(a, 0.0, ReservoirCase::A)?;
    let bath_ns = ReservoirParams::squeezed_vacuum(inp.tau_r, opt_ns.r_tilde, opt_ns.phi_tilde)?;
    let tau_i = decoherence_time_analytic(&ns, &bath_ns);
    let tau_ii = decoherence_time_analytic(&ns, &ReservoirParams::vacuum(inp.tau_r)?);

    let mean_n_ns = a * a;
    let distance_ns = 2.0 * a;
    Ok(AsymptoticReport {
        r_tilde: opt.r_tilde,
        phi_tilde: opt.phi_tilde,
        tau,
        tau_estimate: inp.tau_r / a,
        mean_n: inp.moments.n,
        mean_n_estimate: a * a * (2.0 * inp.r).exp(),
        distance: inp.distance,
        distance_estimate: 2.0 * a * inp.r.exp(),
        mean_n_ns,
        distance_ns,
        tau_i,
        tau_ii,
        ratio_mean_n: inp.moments.n / mean_n_ns,
        ratio_centre_intensity: (inp.distance / 2.0).powi(2) / mean_n_ns,
        ratio_distance: inp.distance / distance_ns,
        ratio_tau_i: tau / tau_i,
        ratio_tau_ii: tau / tau_ii,
        expected_ratio_mean_n: (2.0 * inp.r).exp(),
        expected_ratio_distance: inp.r.exp(),
        expected_ratio_tau_ii: a,
    })
}
