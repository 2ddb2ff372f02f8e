use thiserror::Error;

/// Errors raised by the numerical kernels and the descriptor loaders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),

    #[error("derivatives are only defined for t > 0, got {0}")]
    NonPositiveArgument(f64),

    #[error("node at {path} does not provide a derivative of order {order}")]
    DerivativeUnavailable { path: String, order: u8 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("reference map vanishes on the final window; projective search is degenerate")]
    DegenerateReference,

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid block basis: {0}")]
    InvalidBasis(String),

    #[error("map is not bi-Lipschitz: {0}")]
    NotBiLipschitz(String),

    #[error("invalid cone specification: {0}")]
    InvalidCone(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(path: &str, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.to_string(),
            message: message.into(),
        }
    }
}
