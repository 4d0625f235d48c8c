//! Headline configuration: `|P| = 0.1`, `α = √2`, a `2×10⁻⁴ s` pump and the
//! interaction time solved for equal branch squeezing directions.
//!
//! cargo run --release --example headline_cat

use catfield::engineering::{headline_preset, prepare_cat, EngineeringOptions};
use catfield::fock::squeeze_axis;

fn main() -> catfield::Result<()> {
    let opts = EngineeringOptions::default();
    let (cfg, protocol) = headline_preset(&opts)?;
    println!("chi = {:.3e} s^-1, kappa = {:.3e} s^-1", cfg.chi, cfg.kappa);
    println!("interaction time t2 - t1 = {:.6e} s, pump on for {:.1e} s", cfg.t2 - cfg.t1, cfg.t2 - cfg.t0);
    println!("alpha = {:.6} (rotated onto the stretched axis)", protocol.alpha);
    let cat = prepare_cat(&cfg, &protocol, &opts)?;
    let s = &cat.summary;
    println!("r = [{:.5}, {:.5}], Theta = {:.2e}", s.r[0], s.r[1], s.theta);
    println!("<n> = {:.3}, D = {:.3}, n_max = {}", s.mean_n, s.distance, s.n_max);
    for (k, b) in cat.branch_states.iter().enumerate() {
        println!("branch {}: <a> = {:.4}, major axis at {:.4} rad", k + 1, b.moments().a, squeeze_axis(b));
    }
    Ok(())
}
