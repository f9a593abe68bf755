use thiserror::Error;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("temperature must be non-negative, got {0}")]
    NegativeTemperature(f64),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("step index {index} out of range (must be < {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("time {t} is not before the horizon t_f = {t_f}")]
    PastHorizon { t: f64, t_f: f64 },

    #[error("sweep diverged at iteration {iteration}, step {step}: |r| = {magnitude:e}")]
    Diverged {
        iteration: usize,
        step: usize,
        magnitude: f64,
    },

    #[error("trajectories are on different grids: {0}")]
    GridMismatch(String),

    #[error("spectral domain [{x_min}, {x_max}] too small: {reason}")]
    DomainTooSmall {
        x_min: f64,
        x_max: f64,
        reason: String,
    },

    #[error("propagator kernel K = {value:e} <= 0 at x = {x}, s = {s}; increase grid points or modes")]
    KernelNonPositive { x: f64, s: f64, value: f64 },

    #[error("trajectory left the spectral domain at step {step} (x = {x}); rerun with a larger domain")]
    ExitedDomain { step: usize, x: f64 },

    #[error("stationary-point refinement from seed ({seed_x}, {seed_y}) failed: {reason}")]
    RefinementFailed {
        seed_x: f64,
        seed_y: f64,
        reason: String,
    },

    #[error("eigensolver failed to converge for eigenvalue {0}")]
    EigenNoConvergence(usize),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed CSV: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, BridgeError>;
