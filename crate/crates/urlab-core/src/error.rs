//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Errors produced by parsing, validation, and the enumeration caps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input text could not be parsed. `line` is 1-based (0 for position-less
    /// errors), `pos` is a byte offset within the offending line or source.
    Syntax { line: usize, pos: usize, msg: String },
    /// An enumeration would need `needed` items but the cap is `cap`.
    CapExceeded { needed: usize, cap: usize },
    /// A precondition on an operation was violated.
    Invalid(String),
    /// An internal consistency check failed (e.g. a rounding-gap bound).
    Assertion(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn assertion(msg: impl Into<String>) -> Self {
        Error::Assertion(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Syntax { line, pos, msg } => {
                if *line > 0 {
                    write!(f, "syntax error at line {line}, byte {pos}: {msg}")
                } else {
                    write!(f, "syntax error at byte {pos}: {msg}")
                }
            }
            Error::CapExceeded { needed, cap } => {
                write!(f, "enumeration cap exceeded: {needed} facts > cap {cap}")
            }
            Error::Invalid(msg) => write!(f, "invalid operation: {msg}"),
            Error::Assertion(msg) => write!(f, "internal assertion failed: {msg}"),
        }
    }
}

#[cfg(any(test, feature = "std"))]
impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
