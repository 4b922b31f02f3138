use thiserror::Error;

use crate::net::{NodeId, ValidationReport};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("UNKNOWN_NODE: {0}")]
    UnknownNode(String),

    #[error("invalid network:\n{0}")]
    Invalid(ValidationReport),

    #[error("TOO_LARGE: joint has {cells} cells, cap is {cap}")]
    TooLarge { cells: u128, cap: u128 },

    #[error("NO_SUCH_ARC: {0} -> {1}")]
    NoSuchArc(NodeId, NodeId),

    #[error("PATH_EXISTS: another directed path {0} -> {1} exists")]
    PathExists(NodeId, NodeId),

    #[error("LENGTH_MISMATCH: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("INVALID_PARTITION: {0}")]
    InvalidPartition(String),

    #[error("INELIGIBLE: {0}")]
    Ineligible(String),

    #[error("GENERATION_FAILURE: {0}")]
    GenerationFailure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
