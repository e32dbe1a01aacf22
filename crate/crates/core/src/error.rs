use crate::arith::Rat;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An affine function changes sign inside the interval; the caller has
    /// to split the interval at `root`.
    #[error("affine function changes sign inside the interval at r = {root}")]
    MixedSign { root: Rat },

    #[error("polytope is empty")]
    EmptyPolytope,

    #[error("polytope is unbounded")]
    UnboundedPolytope,

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point {index} lies outside the unit cross-polytope")]
    Containment { index: usize },

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("certificate replay failed: {0}")]
    Replay(String),
}

pub type Result<T> = std::result::Result<T, Error>;
