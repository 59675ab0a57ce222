use thiserror::Error;

use crate::model::{JobId, Objective};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A gene string is not a permutation with repetition of the instance's jobs.
    #[error("invalid genotype: job {job} occurs {found} times, expected {expected}")]
    Genotype { job: JobId, expected: usize, found: usize },

    #[error("invalid instance: {0}")]
    Instance(String),

    #[error("objective {objective} requires a due date, but job {job} has none")]
    MissingDueDate { objective: Objective, job: JobId },

    #[error("invalid objective selection: {0}")]
    Spec(String),

    /// A caller violated an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("enumeration refused: {count} sequences exceed the limit of {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },

    #[error("aspiration levels not converged: {count} alternatives satisfy them")]
    NotConverged { count: usize },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    pub(crate) fn schema(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: msg.into(),
        }
    }
}
