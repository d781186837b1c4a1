use std::fmt;

/// Errors produced by contract violations on the public operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Quadrature order of zero.
    ZeroOrder,
    /// Integration interval with `a > b`; callers dispatch regions and an
    /// inverted interval signals a dispatch bug, not an empty event.
    ReversedInterval { a: f64, b: f64 },
    /// A scheduling operation needs at least two users.
    TooFewUsers { k: usize },
    /// An aggregation was given no input.
    EmptyInput,
    /// Slope fitting requires strictly positive probabilities.
    NonPositiveProbability { value: f64 },
    /// A scenario parameter is outside its documented domain.
    InvalidConfig(String),
    /// A guard combination the case analysis claims impossible was reached.
    UnreachableCase(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroOrder => write!(f, "quadrature order must be at least 1"),
            Error::ReversedInterval { a, b } => {
                write!(f, "integration interval is reversed: a = {a} > b = {b}")
            }
            Error::TooFewUsers { k } => write!(f, "scheduling needs K >= 2 users, got {k}"),
            Error::EmptyInput => write!(f, "input sequence is empty"),
            Error::NonPositiveProbability { value } => {
                write!(f, "probability must be positive for log-log fitting, got {value}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::UnreachableCase(what) => {
                write!(f, "internal case analysis violated: {what}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
