use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node count {got} too small, need at least {min}")]
    NodeCountTooSmall { got: usize, min: usize },

    #[error("node count {0} too large: Gauss weights underflow in f64")]
    NodeCountTooLarge(usize),

    #[error("span must be positive and finite, got {0}")]
    BadSpan(f64),

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered at node {index} (x = {x})")]
    NonFinite { index: usize, x: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("normalization failed: {0}")]
    Normalization(String),

    #[error("reference measure mismatch: {0} vs {1}")]
    ReferenceMismatch(&'static str, &'static str),

    #[error("quadrature diverged: {0}")]
    Divergent(String),

    #[error("cdf mass deficit {0:.3e} exceeds tolerance at the right endpoint")]
    MassDeficit(f64),

    #[error("quantile argument u = {0} outside (0, 1)")]
    QuantileOutOfRange(f64),

    #[error("pushforward check failed: moment {moment} differs by {discrepancy:.3e}")]
    PushforwardCheck { moment: String, discrepancy: f64 },

    #[error("transport map not increasing near x = {0}")]
    NonMonotoneMap(f64),

    #[error("density floor violated: min f = {min} < alpha = {alpha}")]
    FloorViolated { min: f64, alpha: f64 },

    #[error("discrete measure invalid: {0}")]
    BadDiscreteMeasure(String),

    #[error("support size {got} exceeds configured cap {cap}")]
    SupportTooLarge { got: usize, cap: usize },

    #[error("norm drift {0:.3e} beyond tolerance (truncation or grid inadequacy)")]
    NormDrift(f64),

    #[error("function must be symmetric: asymmetry {0:.3e} beyond tolerance")]
    Asymmetric(f64),

    #[error("grids incompatible: {0}")]
    GridMismatch(String),

    #[error("solver failed: {0}")]
    SolverFailed(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
