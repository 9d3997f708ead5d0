use thiserror::Error;

/// Errors produced by the library. Variants mirror the failure classes of the
/// public operations: bad parameters, out-of-range arguments, oversized
/// requests, analytic domain violations, and internal consistency failures
/// (the latter signal a bug, not a caller mistake).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("value {value} out of range [0, {bound}]")]
    Range { value: u64, bound: u64 },

    #[error("size exceeds supported budget: {0}")]
    Sizing(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
