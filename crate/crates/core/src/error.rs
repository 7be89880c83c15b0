use core::fmt;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Hyperedge arity below the supported minimum.
    ArityTooSmall { arity: usize, min: usize },
    /// Two graphs that must share an arity do not.
    ArityMismatch { left: usize, right: usize },
    /// A vertex label is not below the host graph's order.
    VertexOutOfRange { vertex: usize, order: usize },
    /// A vertex label appears twice in a tuple or edge.
    DuplicateVertex { vertex: usize },
    /// A relabeling is not a bijection of `0..n`.
    NotAPermutation,
    /// A numeric argument is outside the domain of the formula.
    OutOfDomain(&'static str),
    /// The requested instance exceeds a hard size cap.
    TooLarge(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ArityTooSmall { arity, min } => {
                write!(f, "arity {arity} is below the minimum of {min}")
            }
            Error::ArityMismatch { left, right } => {
                write!(f, "arity mismatch: {left} vs {right}")
            }
            Error::VertexOutOfRange { vertex, order } => {
                write!(
                    f,
                    "vertex {vertex} out of range for a graph on {order} vertices"
                )
            }
            Error::DuplicateVertex { vertex } => write!(f, "vertex {vertex} repeated"),
            Error::NotAPermutation => f.write_str("relabeling is not a permutation"),
            Error::OutOfDomain(what) => write!(f, "argument out of domain: {what}"),
            Error::TooLarge(what) => write!(f, "instance too large: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
