//! Purity loss of a squeezed even cat in several baths: the closed-form
//! decoherence time, the value from the generator, and a short purity curve.
//!
//! cargo run --release --example decoherence

use catfield::dissipation::{decoherence_report, MasterOptions, ReservoirParams};
use catfield::fock::FockState;
use catfield::optimizer::{optimal_reservoir_closed_form, ReservoirCase};
use catfield::C64;

fn main() -> catfield::Result<()> {
    let (alpha, r, n) = (2f64.sqrt(), 1.0, 192);
    let plus = FockState::coherent(C64::new(alpha, 0.0), n)?;
    let minus = FockState::coherent(C64::new(-alpha, 0.0), n)?;
    let amps: Vec<C64> = plus.amplitudes().iter().zip(minus.amplitudes()).map(|(a, b)| a + b).collect();
    let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let psi = FockState::from_amplitudes(amps.into_iter().map(|c| c / norm).collect())?.apply_squeeze(C64::new(r, 0.0))?;

    let cf = optimal_reservoir_closed_form(alpha, r, ReservoirCase::A)?;
    let baths = [
        ("plain vacuum", ReservoirParams::vacuum(1.0)?),
        ("optimal", ReservoirParams::squeezed_vacuum(1.0, cf.r_tilde, cf.phi_tilde)?),
        ("optimal, rotated by pi/2", ReservoirParams::squeezed_vacuum(1.0, cf.r_tilde, cf.phi_tilde + std::f64::consts::FRAC_PI_2)?),
    ];
    let opts = MasterOptions { grid_points: 6, ..Default::default() };
    for (name, res) in &baths {
        let rep = decoherence_report(&psi, res, Some(0.05), &opts)?;
        println!("{name}: tau/tau_R = {:.6} (generator {:.6})", rep.tau_analytic, rep.tau_numeric);
        for (t, p) in rep.purity_times.iter().zip(&rep.purity) {
            println!("    t = {t:.3}  Tr rho^2 = {p:.6}");
        }
    }
    Ok(())
}
