//! Squeezed mesoscopic superpositions of a parametrically pumped cavity mode.
//!
//! The crate is organised along the physical pipeline:
//!
//! * [`fock`]: truncated number-basis states, operators, Wigner function.
//! * [`squeeze`]: squeeze-parameter dynamics of the pumped, dispersively
//!   shifted oscillator (closed forms and a Bogoliubov integrator).
//! * [`engineering`]: per-branch evolution operators, the cat-state protocol
//!   and a direct Schrödinger-equation reference solver.
//! * [`dissipation`]: squeezed-vacuum master equation and decoherence times.
//! * [`optimizer`]: maximisation of the decoherence time over bath squeezing.
//! * [`cli`]: configuration files, pipelines and output formats.

pub mod cli;
pub mod dissipation;
pub mod engineering;
pub mod error;
pub mod fock;
pub mod ode;
pub mod optimizer;
pub mod serde_ext;
pub mod squeeze;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

/// Wrap an angle to `(-π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut y = x.rem_euclid(two_pi);
    if y > std::f64::consts::PI {
        y -= two_pi;
    }
    y
}

/// Wrap an angle to `[0, 2π)`.
pub fn wrap_2pi(x: f64) -> f64 {
    let y = x.rem_euclid(std::f64::consts::TAU);
    if y >= std::f64::consts::TAU {
        0.0
    } else {
        y
    }
}

/// Shortest signed distance between two angles.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_pi(a - b)
}
