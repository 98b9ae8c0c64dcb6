use thiserror::Error;

use crate::statespec::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state too large: total dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("unknown subsystem {index} (state has {count} subsystems)")]
    UnknownSubsystem { index: usize, count: usize },

    #[error("not positive semidefinite: eigenvalue {0:e}")]
    NotPositiveSemidefinite(f64),

    #[error("incompatible operators: {0}")]
    IncompatibleOperators(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("roles overlap on subsystem {0}")]
    RolesOverlap(usize),

    #[error("invalid role partition: {0}")]
    InvalidPartition(String),

    #[error("global state must be pure (H = {0:e} bits)")]
    NotPure(f64),

    #[error("not an FQSW instance: role A must be empty")]
    NotFqsw,

    #[error("not an FQRS instance: role B must be empty")]
    NotFqrs,

    #[error("successive mode requires role D")]
    MissingRoleD,

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("inconsistent block shapes: {0}")]
    InconsistentBlocks(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}
