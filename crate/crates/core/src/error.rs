use thiserror::Error;

/// Errors produced by the map primitives, counting routines and samplers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not a tree")]
    NotATree,

    #[error("invalid rotation map: {0}")]
    InvalidMap(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("parity mismatch: {0}")]
    Parity(String),

    #[error("enumeration cap exceeded: n = {n} > {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("no maps with n = {n} and g = {g}")]
    NoMaps { n: usize, g: usize },

    #[error("malformed tree code: {0}")]
    BadCode(String),

    #[error("negative table entry for outcome {0}")]
    NegativeEntry(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Whether the error comes from bad input rather than a failure inside.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
