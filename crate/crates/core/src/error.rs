use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("path passes within {distance:e} of a zero of the quadratic differential")]
    NearSingularity { distance: f64 },

    #[error("trajectory does not have two boundary endpoints: {0}")]
    NotFullTrajectory(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
