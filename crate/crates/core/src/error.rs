use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sampling failure: {0}")]
    SamplingFailure(String),

    /// A state became non-finite; `time` is the first grid time at which it was observed.
    #[error("trajectory diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("integration domain too small: {0}")]
    DomainTooSmall(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
