use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of an operation (non-finite entries, bad p, ...).
    #[error("input domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },

    /// A user supplied function produced a non-finite value.
    #[error("function evaluation failed at {at}: got {value}")]
    Evaluation { at: f64, value: String },

    #[error("matrix is not hermitian: max asymmetry {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("ill-posed Sylvester equation: eigenvalues {lambda} and {mu} are {distance:e} apart")]
    IllPosed { lambda: f64, mu: f64, distance: f64 },

    #[error("numerically singular system (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("quadrature configuration error: {0}")]
    Quadrature(String),

    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
