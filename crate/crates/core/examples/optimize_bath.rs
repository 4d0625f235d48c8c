//! Bath squeezing that maximises the decoherence time of even squeezed cats,
//! from a grid search, the exact stationary point and the large-amplitude
//! closed form.
//!
//! cargo run --release --example optimize_bath

use catfield::dissipation::squeezed_cat_moments;
use catfield::optimizer::{maximize_tau, moment_optimum, optimal_reservoir_closed_form, ReservoirCase, SearchConfig};
use catfield::C64;

fn main() -> catfield::Result<()> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    println!("{:>6} {:>5} {:>10} {:>10} {:>10} {:>10} {:>9}", "alpha", "r", "search", "exact", "closed", "tau/tauR", "1/alpha");
    for (alpha, r) in [(1.0, 1.0), (2f64.sqrt(), 1.5), (2.0, 1.0), (2.0, 2.0), (3.0, 1.5)] {
        let m = squeezed_cat_moments(C64::new(alpha, 0.0), h, h, C64::new(r, 0.0))?;
        let res = maximize_tau(&m, 1.0, &SearchConfig::default(), None)?;
        let exact = moment_optimum(&m, 1.0)?;
        let cf = optimal_reservoir_closed_form(alpha, r, ReservoirCase::A)?;
        println!(
            "{alpha:>6.3} {r:>5.2} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>9.5}",
            res.r_tilde_opt,
            exact.r_tilde,
            cf.r_tilde,
            res.tau_opt,
            1.0 / alpha
        );
    }
    Ok(())
}
