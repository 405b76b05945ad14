//! Crate-wide error type.

use std::fmt;

/// Errors produced by configuration validation and simulation drivers.
#[derive(Debug)]
pub enum Error {
    /// A parameter is outside its documented domain.
    InvalidParameter(String),
    /// The requested combination of engine and utility is not supported.
    UnsupportedConfiguration(String),
    /// An exhaustive computation would exceed its size cap.
    TooLarge(String),
    /// An operation was called on an object in the wrong state.
    InvalidState(String),
    /// Underlying I/O failure.
    Io(std::io::Error),
    /// Malformed input file.
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::UnsupportedConfiguration(msg) => write!(f, "unsupported configuration: {msg}"),
            Error::TooLarge(msg) => write!(f, "problem too large: {msg}"),
            Error::InvalidState(msg) => write!(f, "invalid state: {msg}"),
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}
