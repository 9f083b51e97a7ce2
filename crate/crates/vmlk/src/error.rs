//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VmlkError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("distribution must be strictly positive ({0})")]
    NonpositiveDistribution(String),

    #[error("degenerate density: |rho| = {rho:.3e} below floor {floor:.3e}")]
    DegenerateDensity { rho: f64, floor: f64 },

    #[error("torus has no net-charge solutions: |mean(rho) - rho_ion| = {excess:.3e} exceeds {tol:.3e}")]
    NeutralityViolation { excess: f64, tol: f64 },

    #[error("time step rejected at dt = {dt:.3e}: {reason}")]
    StepRejected { dt: f64, reason: String },

    #[error("positivity loss unrecoverable after {halvings} dt-halvings (last dt = {dt:.3e})")]
    PositivityLoss { halvings: u32, dt: f64 },

    #[error("normal system is rank deficient (pivot {pivot:.3e})")]
    SingularSystem { pivot: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, VmlkError>;
