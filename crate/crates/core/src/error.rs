use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the region where an operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A checkpoint file exists but cannot be used to resume.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    /// A computed answer failed its own substitution check.
    #[error("unsound result: {0}")]
    Unsound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
