use thiserror::Error;

use crate::graph::{Edge, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown edge {0}")]
    UnknownEdge(Edge),
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(Edge),
    #[error("graph is not connected")]
    Disconnected,
    #[error("boundary has {found} vertices, expected {expected}")]
    BoundarySize { expected: usize, found: usize },
    #[error("step {index} of the w-sequence is invalid: {reason}")]
    InvalidStep { index: usize, reason: String },
    #[error("universe mismatch between spaces")]
    UniverseMismatch,
    #[error("terminal set has odd size {0}")]
    OddTerminals(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("instance too large for exhaustive mode: {what} = {size} exceeds {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
    #[error("search budget of {0} states exceeded")]
    BudgetExceeded(usize),
    #[error("outputs are equivalent, not siblings")]
    NotSiblings,
    #[error("even-cycle spaces differ")]
    SpacesDiffer,
    #[error("graphs are not equivalent")]
    Inequivalent,
    #[error("invalid flower: {0}")]
    InvalidFlower(String),
    #[error("construction check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn pre<T: Into<String>>(ok: bool, msg: T) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(msg.into()))
    }
}
