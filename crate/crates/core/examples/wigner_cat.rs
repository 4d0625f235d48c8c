//! Wigner function of a squeezed odd cat as a coarse character map; negative
//! regions are the interference fringes.
//!
//! cargo run --release --example wigner_cat

use catfield::fock::{wigner_pure, FockState, GridSpec};
use catfield::C64;

fn main() -> catfield::Result<()> {
    let n = 128;
    let alpha = C64::new(2.0, 0.0);
    let plus = FockState::coherent(alpha, n)?;
    let minus = FockState::coherent(-alpha, n)?;
    let amps: Vec<C64> = plus.amplitudes().iter().zip(minus.amplitudes()).map(|(a, b)| a - b).collect();
    let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let psi = FockState::from_amplitudes(amps.into_iter().map(|c| c / norm).collect())?.apply_squeeze(C64::new(0.4, 0.0))?;

    let grid = GridSpec { x_min: -6.0, x_max: 6.0, nx: 73, y_min: -2.0, y_max: 2.0, ny: 21 };
    let w = wigner_pure(&psi, &grid)?;
    let peak = w.max().abs().max(w.min().abs());
    for iy in (0..grid.ny).rev() {
        let row: String = (0..grid.nx)
            .map(|ix| {
                let v = w.at(ix, iy) / peak;
                match v {
                    v if v > 0.5 => '#',
                    v if v > 0.1 => '+',
                    v if v < -0.5 => '=',
                    v if v < -0.1 => '-',
                    _ => ' ',
                }
            })
            .collect();
        println!("|{row}|");
    }
    println!("integral = {:.6}, min = {:.4}, max = {:.4}", w.integral(), w.min(), w.max());
    Ok(())
}
