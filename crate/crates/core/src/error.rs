use thiserror::Error;

/// Errors raised by the engines.
///
/// The variants line up with the CLI exit codes: `Config` and `Contract`
/// map to exit code 2, `Inconsistency` to exit code 1.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Caller passed arguments outside an operation's domain.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Bad user configuration (flags, config file, missing moments).
    #[error("configuration error: {0}")]
    Config(String),
    /// Two independent computations of the same quantity disagreed.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inconsistency(_) => 1,
            Error::Contract(_) | Error::Config(_) | Error::Io(_) => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
