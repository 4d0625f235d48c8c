//! Squeeze factor and direction of both atomic branches through the three
//! segments (pump alone, pump with atom, pump off), integrator against the
//! closed forms.
//!
//! cargo run --release --example squeeze_trajectory

use catfield::squeeze::{analytic_branch_state, classify_regime, integrate_characteristic, Branch, DriveConfig};
use catfield::{angle_diff, wrap_pi};

fn main() -> catfield::Result<()> {
    // κ = 0.05χ puts both branches in weak coupling, |P| = 0.1
    let cfg = DriveConfig::resonant(1.0, 1.0, 0.05, 0.0, 6.0, 6.0 + 1.4, 9.0);
    let times: Vec<f64> = (0..=18).map(|k| cfg.t_end * k as f64 / 18.0).collect();
    for b in Branch::BOTH {
        let regime = classify_regime(&cfg, b);
        println!("branch {:?}: P = {:+.3}, {:?}", b, regime.p_ell.unwrap_or(0.0), regime.class);
        println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "t", "r", "phi", "dr", "dphi");
        let tr = integrate_characteristic(&cfg, Some(b), (0.0, cfg.eta(cfg.t0) - std::f64::consts::FRAC_PI_2), &times)?;
        for s in &tr.samples {
            let (r, phi) = analytic_branch_state(&cfg, b, s.t)?;
            println!(
                "{:>6.2} {:>10.6} {:>10.6} {:>10.1e} {:>10.1e}",
                s.t,
                s.r,
                wrap_pi(s.phi),
                (r - s.r).abs(),
                angle_diff(phi, s.phi).abs()
            );
        }
    }
    let (_, phi1) = analytic_branch_state(&cfg, Branch::One, cfg.t2)?;
    let (_, phi2) = analytic_branch_state(&cfg, Branch::Two, cfg.t2)?;
    println!("Theta = phi_1(t2) - phi_2(t2) = {:.6}", wrap_pi(phi1 - phi2));
    Ok(())
}
