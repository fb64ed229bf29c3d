use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: u32, got: u32 },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("cannot normalize: coefficient of x0^{degree} vanishes identically")]
    Normalization { degree: u32 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("{what} budget of {limit} exceeded")]
    BudgetExceeded { what: &'static str, limit: usize },

    #[error("Hilbert function did not stabilize for u <= {0}")]
    WindowNotStabilized(u32),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("all {0} sample points hit zeros or poles of the coefficients")]
    SamplingExhausted(usize),

    #[error("hypothesis ({index}) failed: {message}")]
    Hypothesis { index: u8, message: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("quadrature did not reach tolerance {tol:e} within {max_nodes} nodes")]
    QuadratureNotConverged { tol: f64, max_nodes: usize },

    #[error("winding number could not be certified: {0}")]
    WindingNotCertified(String),

    #[error("curve components share a zero near radius {0}")]
    CommonZero(f64),

    #[error("Hilbert weight sequence does not settle: {0}")]
    Oscillating(String),

    #[error("growth index fit failed: {0}")]
    GrowthFit(String),

    #[error("precision cap reached; floor ambiguous near {boundary}")]
    PrecisionCap { boundary: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
