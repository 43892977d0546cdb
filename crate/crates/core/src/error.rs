use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of a function (pole, negative time, ...).
    Domain { what: &'static str, value: f64 },
    /// Argument inside the domain but outside the range this implementation covers.
    Range { what: &'static str, value: f64 },
    /// A model parameter violates its documented constraint.
    InvalidParameter { what: &'static str, value: f64 },
    /// Two representations disagree in size.
    Shape { expected: usize, found: usize },
    /// A numerical procedure did not converge.
    Numerical { what: &'static str, at: f64 },
    /// The input makes the requested quantity meaningless (e.g. zero field).
    Degenerate(&'static str),
    /// A precondition stated by the caller failed at the given point.
    Precondition { what: &'static str, at: f64 },
    /// Requested data was not retained.
    Unavailable(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what}: argument {value} outside the domain"),
            Error::Range { what, value } => {
                write!(f, "{what}: argument {value} outside the supported range")
            }
            Error::InvalidParameter { what, value } => write!(f, "invalid parameter {what} = {value}"),
            Error::Shape { expected, found } => {
                write!(f, "shape mismatch: expected {expected} entries, found {found}")
            }
            Error::Numerical { what, at } => write!(f, "{what} failed at {at}"),
            Error::Degenerate(what) => write!(f, "degenerate input: {what}"),
            Error::Precondition { what, at } => write!(f, "precondition violated: {what} at {at}"),
            Error::Unavailable(what) => write!(f, "{what} not available"),
        }
    }
}

impl core::error::Error for Error {}
