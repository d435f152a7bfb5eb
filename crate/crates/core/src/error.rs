use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("angular momentum {0} is not a non-negative half-integer")]
    InvalidAngularMomentum(f64),

    #[error("quadrature did not converge after {evaluations} kernel evaluations (estimated error {error:.3e}, target {target:.3e})")]
    NonConvergence {
        evaluations: u64,
        error: f64,
        target: f64,
    },

    #[error("estimator is not identifiable: {0}")]
    NonIdentifiable(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing key `{0}`")]
    MissingKey(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
