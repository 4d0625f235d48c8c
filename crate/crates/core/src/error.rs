use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: n_max = {n_max} (need at least {min})")]
    InvalidDimension { n_max: usize, min: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("truncation: tail population {tail:.3e} exceeds tolerance {tol:.1e} at n_max = {n_max}")]
    Truncation { tail: f64, tol: f64, n_max: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("closed-form resonant solution requires eta_slope = -2 omega (got eta_slope = {eta_slope}, omega = {omega})")]
    NotResonant { eta_slope: f64, omega: f64 },

    #[error("weak-coupling solution unavailable: C1 = {c1} <= sqrt(1 - P^2) = {bound}")]
    UnsupportedBranch { c1: f64, bound: f64 },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("integration failure at t = {t:.6e}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("degenerate superposition: zero norm")]
    DegenerateState,

    #[error("invalid reservoir: |M|^2 = {m_abs2} exceeds N(N+1) = {bound}")]
    InvalidReservoir { m_abs2: f64, bound: f64 },

    #[error("state is not pure (purity {purity})")]
    NotPure { purity: f64 },

    #[error("positivity lost: minimum eigenvalue {min_eig:.3e} at t = {t:.6e}")]
    Positivity { min_eig: f64, t: f64 },

    #[error("infeasible target: {reason}")]
    Infeasible { reason: String },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidInput(_) | Error::Io(_) | Error::InvalidReservoir { .. } => 2,
            Error::Infeasible { .. } | Error::UnsupportedBranch { .. } => 3,
            _ => 4,
        }
    }
}
