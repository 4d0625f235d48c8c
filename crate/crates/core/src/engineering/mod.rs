//! Per-branch evolution operators, the cat-state protocol and a direct
//! number-basis Schrödinger solver used as reference.
//!
//! Each atomic branch evolves under
//! `H_ℓ = ω_ℓ a†a + ζ a†² + ζ* a² + ξ a† + ξ* a` and the propagator from `t0`
//! factorizes as `U_ℓ(t) = e^{iγ_ℓ} S(ε_ℓ) D(θ_ℓ) R(β_ℓ)` with
//!
//! ```text
//! iθ̇ = Ωθ + Λ,   β̇ = Ω,   γ̇ = −(Ϝ + Re θ*Λ),
//! Ω = ω_ℓ + 2κ tanh r cos(η − φ),   Ϝ = κ tanh r cos(η − φ),
//! Λ = ξ cosh r + ξ* e^{iφ} sinh r.
//! ```

mod coefficients;
mod evolution;
mod oracle;
mod protocol;

pub use coefficients::{
    branch_coefficients, displacement_trajectory, AnalyticCoefficients, BranchCoefficients, CoefficientModel,
    CoefficientSample, ConstantCoefficients, DisplacementSample, DisplacementTrajectory,
};
pub use evolution::{compose_evolution, BranchEvolution, ComposedEvolution, EvolutionSample, OperatorFactors};
pub use oracle::{invariant_expectation, schrodinger_oracle, schrodinger_oracle_atom_field, AtomFieldState};
pub use protocol::{
    aligned_alpha, headline_preset, headline_template, prepare_cat, protocol_search, theta_for_tau, CatSummary,
    EngineeringOptions, PreparedCat, ProtocolConfig, SearchResult, SearchTargets,
};
