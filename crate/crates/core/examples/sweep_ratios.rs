//! Decoherence time against two baselines across amplitudes and squeeze
//! factors: the unsqueezed cat in the optimal bath (τ_i) and in the plain
//! bath (τ_ii).
//!
//! cargo run --release --example sweep_ratios

use catfield::dissipation::{decoherence_time_analytic, squeezed_cat_moments, ReservoirParams};
use catfield::optimizer::{optimal_reservoir_closed_form, ReservoirCase};
use catfield::C64;
use rayon::prelude::*;

fn main() -> catfield::Result<()> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let cells: Vec<(f64, f64)> = [1.0, 2f64.sqrt(), 2.0, 3.0]
        .iter()
        .flat_map(|&a| [0.5, 1.0, 1.5, 2.0].map(|r| (a, r)))
        .collect();
    let rows: Vec<catfield::Result<[f64; 6]>> = cells
        .par_iter()
        .map(|&(alpha, r)| {
            let a = C64::new(alpha, 0.0);
            let m = squeezed_cat_moments(a, h, h, C64::new(r, 0.0))?;
            let ns = squeezed_cat_moments(a, h, h, C64::new(0.0, 0.0))?;
            let cf = optimal_reservoir_closed_form(alpha, r, ReservoirCase::A)?;
            let cf0 = optimal_reservoir_closed_form(alpha, 0.0, ReservoirCase::A)?;
            let tau = decoherence_time_analytic(&m, &ReservoirParams::squeezed_vacuum(1.0, cf.r_tilde, cf.phi_tilde)?);
            let tau_i = decoherence_time_analytic(&ns, &ReservoirParams::squeezed_vacuum(1.0, cf0.r_tilde, cf0.phi_tilde)?);
            let tau_ii = decoherence_time_analytic(&ns, &ReservoirParams::vacuum(1.0)?);
            Ok([alpha, r, tau, tau / tau_i, tau / tau_ii, m.n / ns.n])
        })
        .collect();
    println!("{:>6} {:>5} {:>9} {:>9} {:>9} {:>9}", "alpha", "r", "tau/tauR", "/tau_i", "/tau_ii", "n/n_NS");
    for row in rows {
        let [a, r, t, ti, tii, n] = row?;
        println!("{a:>6.3} {r:>5.2} {t:>9.5} {ti:>9.4} {tii:>9.4} {n:>9.3}");
    }
    Ok(())
}
