use std::fmt;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A field descriptor document is malformed or fails validation.
    Descriptor(String),
    /// An argument is outside an operation's domain (e.g. degree below the
    /// supported range, or a pole of the value being computed).
    Domain(String),
    /// The requested precision cannot be certified within the iteration budget.
    Precision(String),
    /// An exact integer computation would overflow the working type.
    Overflow(String),
    /// A configured resource budget (memory, enumeration, time) was exceeded.
    ResourceLimit(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Descriptor(msg) => write!(f, "invalid field descriptor: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Precision(msg) => write!(f, "precision not achievable: {msg}"),
            Error::Overflow(msg) => write!(f, "integer overflow: {msg}"),
            Error::ResourceLimit(msg) => write!(f, "resource budget exceeded: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
