//! Error types shared across the library.

use std::fmt;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by evaluation, transform and experiment routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    Domain(String),
    /// Structurally invalid argument (empty grid, non-ascending nodes, ...).
    Argument(String),
    /// A stated precondition was violated.
    Precondition(String),
    /// Evaluation at a pole of a special function.
    Pole(String),
    /// A numerical routine failed to converge or lost accuracy; the message
    /// names the offending point.
    Numerical(String),
    /// Grid resolution insufficient for the requested computation.
    Resolution(String),
    /// An inverse transform was requested before the inversion constant for
    /// the space was calibrated.
    Uncalibrated(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Argument(m) => write!(f, "invalid argument: {m}"),
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::Pole(m) => write!(f, "pole: {m}"),
            Error::Numerical(m) => write!(f, "numerical failure: {m}"),
            Error::Resolution(m) => write!(f, "insufficient resolution: {m}"),
            Error::Uncalibrated(m) => write!(f, "uncalibrated: {m}"),
        }
    }
}

impl std::error::Error for Error {}
