//! Run configuration files.
//!
//! A run is described by one TOML document. Unknown keys are rejected,
//! complex numbers are written as two-element arrays `[re, im]`, and the
//! fully resolved configuration (defaults included) is echoed into every
//! output. See the repository README for the complete key reference.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engineering::{headline_template, EngineeringOptions, ProtocolConfig};
use crate::fock::{GridSpec, DEFAULT_TAIL_TOL};
use crate::optimizer::SearchConfig;
use crate::squeeze::DriveConfig;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Frequencies and times in arbitrary reciprocal units.
    #[default]
    Dimensionless,
    /// Frequencies in s⁻¹ (angular), times in s.
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// `|P| = 0.1`, `α = √2`, `2×10⁻⁴ s` pump, `Θ = 0`.
    Headline,
}

/// Raw file contents.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub preset: Option<Preset>,
    pub drive: Option<DriveConfig>,
    #[serde(default)]
    pub protocol: ProtocolSection,
    pub reservoir: Option<ReservoirSection>,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub outputs: Outputs,
    pub evolve: Option<EvolveSection>,
    pub decohere: Option<DecohereSection>,
    pub optimize: Option<SearchConfig>,
    pub sweep: Option<SweepSection>,
    pub wigner: Option<WignerSection>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub alpha: Option<C64>,
    pub c1: Option<C64>,
    pub c2: Option<C64>,
    pub detected: Option<u8>,
    /// Solve the interaction time for this `Θ`.
    pub target_theta: Option<f64>,
    /// Also solve the pump duration for this mean photon number.
    pub target_mean_n: Option<f64>,
    /// Rotate `α` onto the stretched axis (always done when searching).
    pub align_alpha: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BathKind {
    /// Unsqueezed vacuum.
    Plain,
    /// Explicit `r_tilde`, `phi_tilde`.
    Squeezed,
    /// Closed-form optimum matched to the prepared state.
    Optimal,
    /// Numerical maximisation of the decoherence time.
    Search,
    /// Explicit `n`, `m` (possibly non-minimal).
    Moments,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirSection {
    pub tau_r: f64,
    #[serde(default = "default_bath")]
    pub bath: BathKind,
    pub r_tilde: Option<f64>,
    pub phi_tilde: Option<f64>,
    pub n: Option<f64>,
    pub m: Option<C64>,
}

fn default_bath() -> BathKind {
    BathKind::Optimal
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub n_max: Option<usize>,
    pub ode_tol: f64,
    pub tail_tol: f64,
    /// Spacing of the purity grid; `None` gives 100 intervals.
    pub master_step: Option<f64>,
    pub master_rtol: f64,
    /// Largest cutoff for which the master equation is integrated.
    pub master_max_dim: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self { n_max: None, ode_tol: 1e-11, tail_tol: DEFAULT_TAIL_TOL, master_step: None, master_rtol: 1e-9, master_max_dim: 192 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub dir: Option<String>,
    /// Prepended to every file name.
    pub prefix: String,
    /// Write JSON summaries next to the CSV files.
    pub json: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self { dir: None, prefix: String::new(), json: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSection {
    pub points: usize,
    pub t_start: Option<f64>,
    pub t_stop: Option<f64>,
}

impl Default for EvolveSection {
    fn default() -> Self {
        Self { points: 201, t_start: None, t_stop: None }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecohereSection {
    /// Master-equation horizon; `None` uses `min(2τ, τ_R)`.
    pub horizon: Option<f64>,
    /// State file to analyse instead of running the preparation.
    pub state: Option<String>,
}

/// Explicit values or an inclusive linear range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Range {
    List(Vec<f64>),
    Linear { start: f64, stop: f64, steps: usize },
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Range::List(v) => v.clone(),
            Range::Linear { start, stop, steps } => match steps {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n).map(|k| start + (stop - start) * k as f64 / (*n - 1) as f64).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub alpha: Range,
    pub r: Range,
    /// Squeeze angle relative to the displacement axis (0: stretched).
    #[serde(default)]
    pub phi: Option<Range>,
    #[serde(default = "default_sweep_baths")]
    pub bath: Vec<BathKind>,
}

fn default_sweep_baths() -> Vec<BathKind> {
    vec![BathKind::Optimal]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerSection {
    pub state: Option<String>,
    pub grid: Option<GridSpec>,
}

/// Configuration after defaults and presets are applied.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub mode: Mode,
    pub preset: Option<Preset>,
    pub drive: Option<DriveConfig>,
    pub protocol: ResolvedProtocol,
    /// Defaults to `τ_R = 1` with the optimal bath.
    pub reservoir: ReservoirSection,
    pub numerics: Numerics,
    pub outputs: Outputs,
    pub evolve: EvolveSection,
    pub decohere: DecohereSection,
    pub optimize: SearchConfig,
    pub sweep: Option<SweepSection>,
    pub wigner: Option<WignerSection>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedProtocol {
    pub protocol: ProtocolConfig,
    pub target_mean_n: Option<f64>,
    pub align_alpha: bool,
}

impl Resolved {
    pub fn engineering_options(&self) -> EngineeringOptions {
        EngineeringOptions { n_max: self.numerics.n_max, tail_tol: self.numerics.tail_tol, rtol: self.numerics.ode_tol }
    }

    pub fn drive(&self) -> Result<&DriveConfig> {
        self.drive.as_ref().ok_or_else(|| Error::Config("missing [drive] section (or preset)".into()))
    }


    /// Resolve a path given in the file relative to the file's directory.
    pub fn path(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

pub fn load(path: &Path) -> Result<Resolved> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let raw: RunConfig = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    resolve(raw, base)
}

pub fn resolve(raw: RunConfig, base_dir: PathBuf) -> Result<Resolved> {
    let cfg_err = |m: String| Error::Config(m);
    let (preset_drive, preset_proto) = match raw.preset {
        Some(Preset::Headline) => {
            let (d, p) = headline_template();
            (Some(d), Some(p))
        }
        None => (None, None),
    };
    if raw.preset.is_some() && raw.drive.is_some() {
        return Err(cfg_err("[drive] cannot be combined with a preset".into()));
    }
    let drive = raw.drive.or(preset_drive);
    if let Some(d) = &drive {
        d.validate().map_err(|e| cfg_err(format!("[drive]: {e}")))?;
    }

    let ps = &raw.protocol;
    let base = preset_proto.unwrap_or_else(|| ProtocolConfig::balanced(C64::new(2f64.sqrt(), 0.0), 2));
    let c1 = ps.c1.unwrap_or(base.c1);
    let c2 = ps.c2.unwrap_or(base.c2);
    let norm = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(cfg_err("[protocol]: c1 and c2 cannot both vanish".into()));
    }
    let protocol = ProtocolConfig {
        alpha: ps.alpha.unwrap_or(base.alpha),
        c1: c1 / norm,
        c2: c2 / norm,
        detected: ps.detected.unwrap_or(base.detected),
        target_theta: ps.target_theta.or(base.target_theta),
    };
    protocol.validate().map_err(|e| cfg_err(format!("[protocol]: {e}")))?;
    if let Some(n) = ps.target_mean_n {
        if !(n > 0.0 && n.is_finite()) {
            return Err(cfg_err(format!("[protocol]: target_mean_n must be positive (got {n})")));
        }
        if protocol.target_theta.is_none() {
            return Err(cfg_err("[protocol]: target_mean_n requires target_theta".into()));
        }
    }

    if let Some(r) = &raw.reservoir {
        check_reservoir(r)?;
    }
    let n = &raw.numerics;
    if let Some(d) = n.n_max {
        if d < 2 {
            return Err(cfg_err(format!("[numerics]: n_max must be at least 2 (got {d})")));
        }
    }
    for (name, v) in [("ode_tol", n.ode_tol), ("tail_tol", n.tail_tol), ("master_rtol", n.master_rtol)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(cfg_err(format!("[numerics]: {name} must be in (0, 1) (got {v})")));
        }
    }
    if let Some(s) = n.master_step {
        if !(s > 0.0 && s.is_finite()) {
            return Err(cfg_err(format!("[numerics]: master_step must be positive (got {s})")));
        }
    }
    let evolve = raw.evolve.unwrap_or_default();
    if evolve.points < 2 {
        return Err(cfg_err("[evolve]: points must be at least 2".into()));
    }
    let decohere = raw.decohere.unwrap_or_default();
    if let Some(h) = decohere.horizon {
        if !(h > 0.0 && h.is_finite()) {
            return Err(cfg_err(format!("[decohere]: horizon must be positive (got {h})")));
        }
    }
    let optimize = raw.optimize.unwrap_or_default();
    optimize.validate().map_err(|e| cfg_err(format!("[optimize]: {e}")))?;
    if let Some(s) = &raw.sweep {
        for (name, r) in [("alpha", Some(&s.alpha)), ("r", Some(&s.r)), ("phi", s.phi.as_ref())] {
            if let Some(r) = r {
                let v = r.values();
                if v.is_empty() {
                    return Err(cfg_err(format!("[sweep]: empty range for {name}")));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(cfg_err(format!("[sweep]: non-finite value in {name}")));
                }
            }
        }
        if s.alpha.values().iter().any(|&a| a <= 0.0) {
            return Err(cfg_err("[sweep]: alpha values must be positive".into()));
        }
        if s.r.values().iter().any(|&r| r < 0.0) {
            return Err(cfg_err("[sweep]: r values must be non-negative".into()));
        }
        if s.bath.is_empty() {
            return Err(cfg_err("[sweep]: empty bath list".into()));
        }
        if s.bath.iter().any(|b| matches!(b, BathKind::Squeezed | BathKind::Moments)) {
            return Err(cfg_err("[sweep]: bath entries must be plain, optimal or search".into()));
        }
    }
    if let Some(w) = &raw.wigner {
        if let Some(g) = &w.grid {
            g.validate().map_err(|e| cfg_err(format!("[wigner.grid]: {e}")))?;
        }
    }

    Ok(Resolved {
        mode: raw.mode.unwrap_or(if raw.preset.is_some() { Mode::Si } else { Mode::Dimensionless }),
        preset: raw.preset,
        drive,
        protocol: ResolvedProtocol {
            protocol,
            target_mean_n: ps.target_mean_n,
            align_alpha: ps.align_alpha.unwrap_or(false),
        },
        reservoir: raw.reservoir.unwrap_or(ReservoirSection {
            tau_r: 1.0,
            bath: BathKind::Optimal,
            r_tilde: None,
            phi_tilde: None,
            n: None,
            m: None,
        }),
        numerics: raw.numerics,
        outputs: raw.outputs,
        evolve,
        decohere,
        optimize,
        sweep: raw.sweep,
        wigner: raw.wigner,
        base_dir,
    })
}

fn check_reservoir(r: &ReservoirSection) -> Result<()> {
    let err = |m: &str| Err(Error::Config(format!("[reservoir]: {m}")));
    if !(r.tau_r > 0.0 && r.tau_r.is_finite()) {
        return err("tau_r must be positive");
    }
    let squeeze_set = r.r_tilde.is_some() || r.phi_tilde.is_some();
    let moments_set = r.n.is_some() || r.m.is_some();
    match r.bath {
        BathKind::Squeezed => {
            if r.r_tilde.is_none() || r.phi_tilde.is_none() || moments_set {
                return err("bath = \"squeezed\" needs r_tilde and phi_tilde only");
            }
            if r.r_tilde.is_some_and(|x| !(x >= 0.0 && x.is_finite())) {
                return err("r_tilde must be non-negative");
            }
        }
        BathKind::Moments => {
            if r.n.is_none() || r.m.is_none() || squeeze_set {
                return err("bath = \"moments\" needs n and m only");
            }
        }
        _ => {
            if squeeze_set || moments_set {
                return err("r_tilde/phi_tilde/n/m are only allowed with bath = \"squeezed\" or \"moments\"");
            }
        }
    }
    Ok(())
}
