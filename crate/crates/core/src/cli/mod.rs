//! Command-line front end.
//!
//! ```text
//! catfield <engineer|evolve|decohere|optimize|sweep|wigner> --config <path> [--out <dir>] [--threads N]
//! ```
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 infeasible
//! target, 4 numerical failure. The output directory is taken from `--out`,
//! then the `CATFIELD_OUT` environment variable, then `outputs.dir` in the
//! configuration (relative to the configuration file), then the working
//! directory.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::dissipation::{
    asymptotic_report, decoherence_report, AsymptoticInput, AsymptoticReport, DecoherenceReport, MasterOptions,
    ReservoirParams, squeezed_cat_moments, decoherence_time_analytic,
};
use crate::engineering::{
    aligned_alpha, prepare_cat, protocol_search, BranchEvolution, CatSummary, PreparedCat, ProtocolConfig,
    SearchResult, SearchTargets,
};
use crate::fock::{wigner_pure, FockState, GridSpec, Moments};
use crate::optimizer::{
    closed_form_result, maximize_tau, moment_optimum, optimal_reservoir_closed_form, ClosedFormOptimum, MomentOptimum,
    OptimizationResult,
    ReservoirCase,
};
use crate::serde_ext::f64_ext;
use crate::squeeze::{analytic_branch_state, classify_regime, Branch, CouplingRegime, DriveConfig, RegimeClass};
use crate::{Error, Result, C64};

use config::{BathKind, Resolved};
use output::{Cell, OutputSet, Provenance};

/// Environment variable overriding the output directory.
pub const OUT_ENV: &str = "CATFIELD_OUT";

#[derive(Debug, Parser)]
#[command(name = "catfield", version, about = "Squeezed cat states in a pumped cavity and their decoherence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Prepare the squeezed superposition and write its amplitudes.
    Engineer(CommonArgs),
    /// Squeeze parameters and operator factors along the drive timeline.
    Evolve(CommonArgs),
    /// Decoherence times and purity curve under the configured bath.
    Decohere(CommonArgs),
    /// Maximise the decoherence time over the bath squeezing.
    Optimize(CommonArgs),
    /// Decoherence comparisons over a grid of amplitudes and squeeze factors.
    Sweep(CommonArgs),
    /// Wigner function of a state file or of the prepared state.
    Wigner(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Engineer(_) => "engineer",
            Command::Evolve(_) => "evolve",
            Command::Decohere(_) => "decohere",
            Command::Optimize(_) => "optimize",
            Command::Sweep(_) => "sweep",
            Command::Wigner(_) => "wigner",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Engineer(a)
            | Command::Evolve(a)
            | Command::Decohere(a)
            | Command::Optimize(a)
            | Command::Sweep(a)
            | Command::Wigner(a) => a,
        }
    }
}

/// Result of a completed command.
#[derive(Debug)]
pub struct RunOutcome {
    pub written: Vec<PathBuf>,
    pub messages: Vec<String>,
    pub warnings: Vec<String>,
    /// Non-zero when outputs were written but the target was infeasible.
    pub exit_code: i32,
}

/// Parse arguments, run, print messages and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli.command) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for m in &out.messages {
                println!("{m}");
            }
            out.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cmd: &Command) -> Result<RunOutcome> {
    let args = cmd.args();
    let cfg = config::load(&args.config)?;
    let out_dir = output_dir(args.out.as_deref(), &cfg);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let prov = Provenance::new(cmd.name(), &cfg)?;
    let mut out = OutputSet::new(prov, &cfg.outputs.prefix);
    let mut report = Report::default();
    pool.install(|| match cmd {
        Command::Engineer(_) => cmd_engineer(&cfg, &mut out, &mut report),
        Command::Evolve(_) => cmd_evolve(&cfg, &mut out, &mut report),
        Command::Decohere(_) => cmd_decohere(&cfg, &mut out, &mut report),
        Command::Optimize(_) => cmd_optimize(&cfg, &mut out, &mut report),
        Command::Sweep(_) => cmd_sweep(&cfg, &mut out, &mut report),
        Command::Wigner(_) => cmd_wigner(&cfg, &mut out, &mut report),
    })?;
    let written = out.commit(&out_dir, &cfg)?;
    Ok(RunOutcome { written, messages: report.messages, warnings: report.warnings, exit_code: report.exit_code })
}

fn output_dir(flag: Option<&Path>, cfg: &Resolved) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    match &cfg.outputs.dir {
        Some(d) => cfg.path(d),
        None => PathBuf::from("."),
    }
}

#[derive(Debug, Default)]
struct Report {
    messages: Vec<String>,
    warnings: Vec<String>,
    exit_code: i32,
}

/// Prepared superposition and how it was obtained.
struct Prepared {
    drive: DriveConfig,
    protocol: ProtocolConfig,
    search: Option<SearchResult>,
    cat: PreparedCat,
}

fn prepare(cfg: &Resolved) -> Result<Prepared> {
    let drive = *cfg.drive()?;
    let opts = cfg.engineering_options();
    let p = &cfg.protocol;
    if let Some(theta) = p.protocol.target_theta {
        let targets = SearchTargets { theta, mean_n: p.target_mean_n };
        let search = protocol_search(&drive, &p.protocol, &targets, &opts)?;
        let cat = prepare_cat(&search.drive, &search.protocol, &opts)?;
        Ok(Prepared { drive: search.drive, protocol: search.protocol, search: Some(search), cat })
    } else {
        let mut protocol = p.protocol;
        if p.align_alpha {
            protocol.alpha = aligned_alpha(&drive, protocol.alpha.norm(), &opts)?;
        }
        let cat = prepare_cat(&drive, &protocol, &opts)?;
        Ok(Prepared { drive, protocol, search: None, cat })
    }
}

fn degenerate(cat: &PreparedCat) -> bool {
    cat.summary.warnings.iter().any(|w| w.contains("degenerate branches"))
}

#[derive(Serialize)]
struct EngineerDoc<'a> {
    summary: &'a CatSummary,
    drive: &'a DriveConfig,
    protocol: &'a ProtocolConfig,
    search: &'a Option<SearchResult>,
    regime: [CouplingRegime; 2],
    /// Squeezing direction relative to the displacement of each component.
    stretched: [bool; 2],
}

fn stretched(cat: &PreparedCat, k: usize) -> bool {
    let centre = cat.branch_states[k].moments().a;
    centre.norm() == 0.0 || (cat.summary.phi[k] - 2.0 * centre.arg()).cos() >= 0.0
}

fn cmd_engineer(cfg: &Resolved, out: &mut OutputSet, report: &mut Report) -> Result<()> {
    let prep = prepare(cfg)?;
    let s = &prep.cat.summary;
    report.warnings.extend(s.warnings.iter().cloned());
    let comments = vec![format!("n_max: {}", s.n_max), "columns: n (Fock index), re, im (amplitude)".to_string()];
    out.state("state.csv", &comments, &prep.cat.state);
    out.state("branch1.csv", &comments, &prep.cat.branch_states[0]);
    if !degenerate(&prep.cat) {
        out.state("branch2.csv", &comments, &prep.cat.branch_states[1]);
    }
    if cfg.outputs.json {
        out.json(
            "summary.json",
            &EngineerDoc {
                summary: s,
                drive: &prep.drive,
                protocol: &prep.protocol,
                search: &prep.search,
                regime: [classify_regime(&prep.drive, Branch::One), classify_regime(&prep.drive, Branch::Two)],
                stretched: [stretched(&prep.cat, 0), stretched(&prep.cat, 1)],
            },
        )?;
    }
    report.messages.push(format!(
        "r = [{:.6}, {:.6}]  phi = [{:.6}, {:.6}]  Theta = {:.6}  <n> = {:.6}  D = {:.6}  n_max = {}",
        s.r[0], s.r[1], s.phi[0], s.phi[1], s.theta, s.mean_n, s.distance, s.n_max
    ));
    Ok(())
}

fn cmd_evolve(cfg: &Resolved, out: &mut OutputSet, report: &mut Report) -> Result<()> {
    let drive = *cfg.drive()?;
    let e = &cfg.evolve;
    let t_start = e.t_start.unwrap_or(drive.t0);
    let t_stop = e.t_stop.unwrap_or(drive.t_end);
    if t_start < drive.t0 || !(t_stop > t_start) {
        return Err(Error::Config(format!("[evolve]: need t0 <= t_start < t_stop (got {t_start}, {t_stop})")));
    }
    let mut times = vec![drive.t0];
    for k in 0..e.points {
        let t = t_start + (t_stop - t_start) * k as f64 / (e.points - 1) as f64;
        if t > *times.last().unwrap_or(&f64::NEG_INFINITY) {
            times.push(t);
        }
    }
    let branches: Vec<Branch> = if drive.chi == 0.0 { vec![Branch::One] } else { Branch::BOTH.to_vec() };
    if drive.chi == 0.0 {
        report.warnings.push("degenerate branches: chi = 0, single-branch output".into());
    }
    let evos: Vec<Result<BranchEvolution>> = branches
        .par_iter()
        .map(|&b| BranchEvolution::compute(&drive, Some(b), &times, cfg.numerics.ode_tol))
        .collect();
    let closed_ok = drive.is_resonant() && (drive.chi == 0.0 || classify_regime(&drive, Branch::One).class == RegimeClass::Weak);
    let mut rows = Vec::new();
    for (b, evo) in branches.iter().zip(evos) {
        let evo = evo?;
        for s in evo.samples.iter().filter(|s| s.t >= t_start) {
            let (rc, pc) = if closed_ok {
                analytic_branch_state(&drive, *b, s.t).unwrap_or((f64::NAN, f64::NAN))
            } else {
                (f64::NAN, f64::NAN)
            };
            rows.push(vec![
                Cell::F(s.t),
                Cell::I(b.index() as i64),
                Cell::F(s.r()),
                Cell::F(s.phi()),
                Cell::F(s.bogoliubov.cosh_2r()),
                Cell::F(rc),
                Cell::F(pc),
                Cell::F(s.theta.re),
                Cell::F(s.theta.im),
                Cell::F(s.beta),
                Cell::F(s.gamma),
                Cell::F(s.f),
            ]);
        }
    }
    out.csv(
        "evolution.csv",
        &["r_closed, phi_closed: closed-form squeeze parameters (nan where unavailable)".into()],
        &["t", "branch", "r", "phi", "cosh_2r", "r_closed", "phi_closed", "theta_re", "theta_im", "beta", "gamma", "f"],
        &rows,
    );
    report.messages.push(format!("{} samples per branch on [{t_start}, {t_stop}]", e.points));
    Ok(())
}

/// Smallest cutoff keeping population below `tol` in its upper quarter.
fn compact(psi: &FockState, tol: f64) -> Result<FockState> {
    let amps = psi.amplitudes();
    let n = amps.len();
    let mut suffix = vec![0.0; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1] + amps[k].norm_sqr();
    }
    let mut d = 16usize.min(n);
    while d < n && suffix[(3 * d) / 4] > tol {
        d += 8;
    }
    psi.clone().with_tail_tol(tol.max(psi.tail_tol())).resize(d.min(n))
}

fn bath_from(
    cfg: &Resolved,
    moments: &Moments,
    matched: Option<ClosedFormOptimum>,
) -> Result<(ReservoirParams, Option<OptimizationResult>)> {
    let r = &cfg.reservoir;
    match r.bath {
        BathKind::Plain => Ok((ReservoirParams::vacuum(r.tau_r)?, None)),
        BathKind::Squeezed => Ok((
            ReservoirParams::squeezed_vacuum(r.tau_r, r.r_tilde.unwrap_or(0.0), r.phi_tilde.unwrap_or(0.0))?,
            None,
        )),
        BathKind::Moments => Ok((
            ReservoirParams::from_moments(r.tau_r, r.n.unwrap_or(0.0), r.m.unwrap_or_default())?,
            None,
        )),
        BathKind::Optimal => {
            let cf = matched.ok_or_else(|| {
                Error::Config("bath = \"optimal\" needs the prepared state; use bath = \"search\" for a state file".into())
            })?;
            Ok((ReservoirParams::squeezed_vacuum(r.tau_r, cf.r_tilde, cf.phi_tilde)?, None))
        }
        BathKind::Search => {
            let opt = maximize_tau(moments, r.tau_r, &cfg.optimize, matched)?;
            Ok((ReservoirParams::squeezed_vacuum(r.tau_r, opt.r_tilde_opt, opt.phi_tilde_opt)?, Some(opt)))
        }
    }
}

/// Closed-form bath for a prepared cat. The case follows from the squeeze
/// direction of branch 1 relative to its displacement; the bath angle equals
/// the squeeze angle of the state in both cases.
fn matched_closed_form(prep: &Prepared) -> Result<ClosedFormOptimum> {
    let s = &prep.cat.summary;
    let case = if stretched(&prep.cat, 0) { ReservoirCase::A } else { ReservoirCase::B };
    let mut cf = optimal_reservoir_closed_form(prep.protocol.alpha.norm(), s.r[0], case)?;
    cf.phi_tilde = crate::wrap_2pi(s.phi[0]);
    Ok(cf)
}

#[derive(Serialize)]
struct DecohereDoc<'a> {
    report: &'a DecoherenceReport,
    tau_r: f64,
    r_tilde: Option<f64>,
    phi_tilde: Option<f64>,
    #[serde(serialize_with = "f64_ext")]
    horizon: f64,
    master_dimension: Option<usize>,
    purity_curve_note: Option<String>,
    search: Option<&'a OptimizationResult>,
    asymptotic: Option<AsymptoticReport>,
    summary: Option<&'a CatSummary>,
}

fn cmd_decohere(cfg: &Resolved, out: &mut OutputSet, report: &mut Report) -> Result<()> {
    let (psi, prep) = match &cfg.decohere.state {
        Some(p) => (output::read_state(&cfg.path(p), cfg.numerics.tail_tol)?, None),
        None => {
            let prep = prepare(cfg)?;
            (prep.cat.state.clone(), Some(prep))
        }
    };
    let moments = psi.moments();
    let matched = match &prep {
        Some(p) => Some(matched_closed_form(p)?),
        None => None,
    };
    let (bath, search) = bath_from(cfg, &moments, matched)?;
    let tau_an = decoherence_time_analytic(&moments, &bath);
    let horizon = cfg.decohere.horizon.unwrap_or(if tau_an.is_finite() { (2.0 * tau_an).min(bath.tau_r()) } else { bath.tau_r() });

    let small = compact(&psi, cfg.numerics.tail_tol)?;
    let run_master = small.n_max() <= cfg.numerics.master_max_dim;
    let note = if run_master {
        None
    } else {
        Some(format!(
            "purity curve skipped: state needs n_max = {} > master_max_dim = {}",
            small.n_max(),
            cfg.numerics.master_max_dim
        ))
    };
    if let Some(n) = &note {
        report.warnings.push(n.clone());
    }
    let grid_points = match cfg.numerics.master_step {
        Some(step) => ((horizon / step).ceil() as usize).max(1) + 1,
        None => 101,
    };
    let mopts = MasterOptions {
        rtol: cfg.numerics.master_rtol,
        grid_points,
        tail_tol: 1e-6,
        ..Default::default()
    };
    // Decoherence times on the full state, purity curve on the compact one.
    let mut rep = decoherence_report(&psi, &bath, None, &mopts)?;
    if run_master {
        let curve = decoherence_report(&small, &bath, Some(horizon), &mopts)?;
        rep.purity_times = curve.purity_times;
        rep.purity = curve.purity;
    }

    let asymptotic = match &prep {
        Some(p) => {
            let s = &p.cat.summary;
            Some(asymptotic_report(&AsymptoticInput {
                alpha: p.protocol.alpha.norm(),
                r: s.r[0],
                c1: p.protocol.c1,
                c2: p.protocol.c2,
                moments,
                distance: s.distance,
                tau_r: bath.tau_r(),
            })?)
        }
        None => None,
    };

    let rows: Vec<Vec<Cell>> =
        rep.purity_times.iter().zip(&rep.purity).map(|(t, p)| vec![Cell::F(*t), Cell::F(*p)]).collect();
    let mut comments = vec![format!("tau_r: {}", output_fmt(bath.tau_r()))];
    if let Some(n) = &note {
        comments.push(n.clone());
    }
    out.csv("purity.csv", &comments, &["t", "purity"], &rows);
    let (r_t, p_t) = bath.squeeze().map(|(a, b)| (Some(a), Some(b))).unwrap_or((None, None));
    out.json(
        "decoherence.json",
        &DecohereDoc {
            report: &rep,
            tau_r: bath.tau_r(),
            r_tilde: r_t,
            phi_tilde: p_t,
            horizon,
            master_dimension: run_master.then_some(small.n_max()),
            purity_curve_note: note,
            search: search.as_ref(),
            asymptotic,
            summary: prep.as_ref().map(|p| &p.cat.summary),
        },
    )?;
    report.messages.push(format!(
        "tau_analytic = {}  tau_numeric = {}  relative deviation = {}",
        output_fmt(rep.tau_analytic),
        output_fmt(rep.tau_numeric),
        output_fmt(rep.relative_deviation)
    ));
    Ok(())
}

fn output_fmt(x: f64) -> String {
    crate::serde_ext::fmt_f64(x)
}

#[derive(Serialize)]
struct OptimizeDoc<'a> {
    tau_r: f64,
    moments: Moments,
    result: &'a OptimizationResult,
    /// Maximiser from `φ̃ = arg Δ`, `tanh 2r̃ = |Δ|/P`.
    exact: MomentOptimum,
    closed_form: Option<OptimizationResult>,
    /// Components squeezed alike and well separated, where the closed form applies.
    closed_form_applicable: bool,
    summary: &'a CatSummary,
}

fn cmd_optimize(cfg: &Resolved, out: &mut OutputSet, report: &mut Report) -> Result<()> {
    let tau_r = cfg.reservoir.tau_r;
    let prep = prepare(cfg)?;
    let moments = prep.cat.state.moments();
    let cf = matched_closed_form(&prep)?;
    let alpha = prep.protocol.alpha.norm();
    let applicable = prep.cat.summary.theta.abs() < 1e-3 && (-2.0 * alpha * alpha).exp() < 0.05;
    let result = maximize_tau(&moments, tau_r, &cfg.optimize, Some(cf))?;
    let closed = closed_form_result(&moments, tau_r, cf)?;
    if cf.clamped {
        report.warnings.push(format!(
            "closed-form bath squeeze factor {:.6} is negative; clamped to 0",
            cf.r_tilde_unclamped
        ));
        report.exit_code = 3;
    }
    if result.plateau {
        report.warnings.push("pointer state: decoherence time unbounded on the search region".into());
    }
    out.json(
        "optimize.json",
        &OptimizeDoc {
            tau_r,
            moments,
            result: &result,
            exact: moment_optimum(&moments, tau_r)?,
            closed_form: Some(closed),
            closed_form_applicable: applicable,
            summary: &prep.cat.summary,
        },
    )?;
    report.messages.push(format!(
        "r_tilde = {:.8}  phi_tilde = {:.8}  tau = {}  (closed form: r_tilde = {:.8}, phi_tilde = {:.8})",
        result.r_tilde_opt,
        result.phi_tilde_opt,
        output_fmt(result.tau_opt),
        cf.r_tilde,
        cf.phi_tilde
    ));
    Ok(())
}

fn bath_name(b: BathKind) -> &'static str {
    match b {
        BathKind::Plain => "plain",
        BathKind::Squeezed => "squeezed",
        BathKind::Optimal => "optimal",
        BathKind::Search => "search",
        BathKind::Moments => "moments",
    }
}

struct SweepRow {
    alpha: f64,
    r: f64,
    phi: f64,
    bath: BathKind,
    r_tilde: f64,
    phi_tilde: f64,
    tau: f64,
    tau_i: f64,
    tau_ii: f64,
    mean_n: f64,
    distance: f64,
}

fn sweep_cell(cfg: &Resolved, tau_r: f64, alpha: f64, r: f64, phi: f64, bath: BathKind) -> Result<SweepRow> {
    let p = &cfg.protocol.protocol;
    let a = C64::new(alpha, 0.0);
    let m = squeezed_cat_moments(a, p.c1, p.c2, C64::from_polar(r, phi))?;
    let ns = squeezed_cat_moments(a, p.c1, p.c2, C64::new(0.0, 0.0))?;
    let case = if phi.cos() >= 0.0 { ReservoirCase::A } else { ReservoirCase::B };
    let (r_tilde, phi_tilde, tau) = match bath {
        BathKind::Plain => (0.0, 0.0, decoherence_time_analytic(&m, &ReservoirParams::vacuum(tau_r)?)),
        BathKind::Optimal => {
            let cf = optimal_reservoir_closed_form(alpha, r, case)?;
            let phi_t = crate::wrap_2pi(phi);
            let b = ReservoirParams::squeezed_vacuum(tau_r, cf.r_tilde, phi_t)?;
            (cf.r_tilde, phi_t, decoherence_time_analytic(&m, &b))
        }
        BathKind::Search => {
            let o = maximize_tau(&m, tau_r, &cfg.optimize, None)?;
            (o.r_tilde_opt, o.phi_tilde_opt, o.tau_opt)
        }
        BathKind::Squeezed | BathKind::Moments => {
            return Err(Error::Config("[sweep]: unsupported bath kind".into()));
        }
    };
    let cf0 = optimal_reservoir_closed_form(alpha, 0.0, ReservoirCase::A)?;
    let tau_i = decoherence_time_analytic(&ns, &ReservoirParams::squeezed_vacuum(tau_r, cf0.r_tilde, cf0.phi_tilde)?);
    let tau_ii = decoherence_time_analytic(&ns, &ReservoirParams::vacuum(tau_r)?);
    let centre = a * r.cosh() + C64::from_polar(r.sinh(), phi) * a.conj();
    Ok(SweepRow { alpha, r, phi, bath, r_tilde, phi_tilde, tau, tau_i, tau_ii, mean_n: m.n, distance: 2.0 * centre.norm() })
}

fn cmd_sweep(cfg: &Resolved, out: &mut OutputSet, report: &mut Report) -> Result<()> {
    let s = cfg.sweep.as_ref().ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
    let tau_r = cfg.reservoir.tau_r;
    let phis = s.phi.as_ref().map(|p| p.values()).unwrap_or_else(|| vec![0.0]);
    let mut cells = Vec::new();
    for &a in &s.alpha.values() {
        for &r in &s.r.values() {
            for &p in &phis {
                for &b in &s.bath {
                    cells.push((a, r, p, b));
                }
            }
        }
    }
    let rows: Vec<Result<SweepRow>> = cells.par_iter().map(|&(a, r, p, b)| sweep_cell(cfg, tau_r, a, r, p, b)).collect();
    let mut table = Vec::with_capacity(rows.len());
    for row in rows {
        let w = row?;
        table.push(vec![
            Cell::F(w.alpha),
            Cell::F(w.r),
            Cell::F(w.phi),
            Cell::S(bath_name(w.bath).into()),
            Cell::F(w.r_tilde),
            Cell::F(w.phi_tilde),
            Cell::F(w.tau),
            Cell::F(w.tau / tau_r),
            Cell::F(w.tau_i),
            Cell::F(w.tau_ii),
            Cell::F(w.tau / w.tau_i),
            Cell::F(w.tau / w.tau_ii),
            Cell::F(w.alpha),
            Cell::F(w.mean_n),
            Cell::F(w.mean_n / (w.alpha * w.alpha)),
            Cell::F((2.0 * w.r).exp()),
            Cell::F(w.distance),
            Cell::F(w.distance / (2.0 * w.alpha)),
            Cell::F(w.r.exp()),
        ]);
    }
    out.csv(
        "sweep.csv",
        &[
            format!("tau_r: {}", output_fmt(tau_r)),
            "tau_i: unsqueezed cat, optimal squeezed bath; tau_ii: unsqueezed cat, plain bath".into(),
            "rows ordered by alpha, r, phi, bath".into(),
        ],
        &[
            "alpha",
            "r",
            "phi",
            "bath",
            "r_tilde",
            "phi_tilde",
            "tau",
            "tau_over_tau_r",
            "tau_i",
            "tau_ii",
            "ratio_tau_i",
            "ratio_tau_ii",
            "expected_ratio_tau_ii",
            "mean_n",
            "ratio_mean_n",
            "expected_ratio_mean_n",
            "distance",
            "ratio_distance",
            "expected_ratio_distance",
        ],
        &table,
    );
    report.messages.push(format!("{} sweep rows", table.len()));
    Ok(())
}

#[derive(Serialize)]
struct WignerDoc {
    grid: GridSpec,
    /// Standard deviation of the narrowest quadrature.
    min_width: f64,
    spacing: f64,
    resolved: bool,
    n_max: usize,
    integral: f64,
    min: f64,
    max: f64,
}

fn cmd_wigner(cfg: &Resolved, out: &mut OutputSet, report: &mut Report) -> Result<()> {
    let section = cfg.wigner.as_ref();
    let psi = match section.and_then(|w| w.state.as_ref()) {
        Some(p) => output::read_state(&cfg.path(p), cfg.numerics.tail_tol)?,
        None => prepare(cfg)?.cat.state,
    };
    let psi = compact(&psi, cfg.numerics.tail_tol)?;
    let m = psi.moments();
    let var_min = 0.5 * (m.n - m.a.norm_sqr()) + 0.25 - 0.5 * (m.a2 - m.a * m.a).norm();
    let min_width = var_min.max(0.0).sqrt();
    let grid = match section.and_then(|w| w.grid) {
        Some(g) => g,
        None => GridSpec::square((m.n.sqrt() + 3.0).max(3.0), 101),
    };
    let spacing = ((grid.x_max - grid.x_min) / (grid.nx - 1) as f64).max((grid.y_max - grid.y_min) / (grid.ny - 1) as f64);
    let resolved = spacing <= min_width;
    if !resolved {
        report.warnings.push(format!(
            "grid spacing {spacing:.3e} exceeds the narrowest quadrature width {min_width:.3e}; the grid integral is unreliable"
        ));
    }
    let w = wigner_pure(&psi, &grid)?;
    let mut rows = Vec::with_capacity(w.w.len());
    for (iy, y) in w.ys.iter().enumerate() {
        for (ix, x) in w.xs.iter().enumerate() {
            rows.push(vec![Cell::F(*x), Cell::F(*y), Cell::F(w.at(ix, iy))]);
        }
    }
    out.csv(
        "wigner.csv",
        &["W(x + iy) for the coherent-amplitude plane; integral over dx dy is 1".into()],
        &["x", "y", "W"],
        &rows,
    );
    let doc = WignerDoc { grid, min_width, spacing, resolved, n_max: psi.n_max(), integral: w.integral(), min: w.min(), max: w.max() };
    if cfg.outputs.json {
        out.json("wigner.json", &doc)?;
    }
    report.messages.push(format!("integral = {:.9}  min = {:.6e}  max = {:.6e}", doc.integral, doc.min, doc.max));
    Ok(())
}
