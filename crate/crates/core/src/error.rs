use thiserror::Error;

pub type Result<T> = std::result::Result<T, MwlError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MwlError {
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("spectral domain error: eigenvalue {eigenvalue:e} is not admissible for {function}")]
    Domain { function: String, eigenvalue: f64 },

    #[error("matrix is singular or ill-conditioned (smallest singular value {smallest_singular_value:e}, condition {condition:e})")]
    Singular {
        smallest_singular_value: f64,
        condition: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "weight is not positive definite at grid index {index} (min eigenvalue {min_eigenvalue:e})"
    )]
    NotPositiveDefinite { index: usize, min_eigenvalue: f64 },

    #[error("weight spectrum out of range at grid index {index}: eigenvalue {eigenvalue:e}")]
    SpectrumOutOfRange { index: usize, eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("optimizer did not certify its value: ratio to dual lower bound {ratio:e} after {iterations} iterations")]
    OptimizerNonConvergence { ratio: f64, iterations: usize },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("selector sandwich violated: {lower:e} <= {value:e} <= {upper:e} fails")]
    SandwichViolation { lower: f64, value: f64, upper: f64 },

    #[error("zero input: {0}")]
    ZeroInput(String),

    #[error("missing derivation of order {0}")]
    MissingOrder(usize),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl From<std::io::Error> for MwlError {
    fn from(e: std::io::Error) -> Self {
        MwlError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for MwlError {
    fn from(e: serde_json::Error) -> Self {
        MwlError::Format(e.to_string())
    }
}
