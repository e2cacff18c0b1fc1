use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operand is not an element of this group instance")]
    ForeignElement,
    #[error("invalid free factor index {0}")]
    InvalidFactor(usize),
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("cofinality not witnessed within {0} steps")]
    CofinalityNotWitnessed(u64),
    #[error("kernel membership could not be decided for the supplied element")]
    KernelUndecidable,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("group of order {order} exceeds the enumeration bound {bound}")]
    BoundExceeded { order: usize, bound: usize },
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("malformed cocycle: {0}")]
    MalformedCocycle(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("integer overflow")]
    Overflow,
    #[error("rotation tag {tag} disagrees with the computed interval {interval}")]
    InconsistentRotation { tag: String, interval: String },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
