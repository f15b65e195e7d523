use thiserror::Error;

/// Errors raised by the compiler, simulator and file front end.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// A request exceeds a dense-construction cap.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A numerical invariant that should hold by construction was violated.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// A malformed input file or flag value.
    #[error("input error: {0}")]
    Input(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Input(_) | Error::Io(_) => 2,
            Error::Resource(_) => 3,
            Error::Invariant(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
