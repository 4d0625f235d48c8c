//! Truncated Fock-space linear algebra.

mod expm;
mod measures;
mod ops;
mod state;
mod wigner;

pub use expm::{expm_action, expm_dense};
pub use measures::{
    expectation, phase_space_distance, purity, squeeze_axis, Moments, StateRef,
};
pub use ops::{annihilation_matrix, creation_matrix, number_matrix, BandedOp, Quadratic};
pub use state::{
    apply_displacement, apply_rotation, apply_squeeze, coherent_state, suggest_n_max, DensityMatrix, FockState,
    Quadratures, DEFAULT_TAIL_TOL,
};
pub use wigner::{wigner, wigner_point, wigner_pure, GridSpec, WignerGrid};
