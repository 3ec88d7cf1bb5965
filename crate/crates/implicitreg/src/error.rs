//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate edge {u}-{v}")]
    DuplicateEdge { u: usize, v: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("nonpositive weight {w} on edge {u}-{v}")]
    NonpositiveWeight { u: usize, v: usize, w: f64 },

    #[error("empty graph")]
    EmptyGraph,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("dense limit exceeded: n={n} > limit {limit}")]
    DenseLimitExceeded { n: usize, limit: usize },

    #[error("did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("bisection failed: {0}")]
    BisectionFailure(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("unsupported pairing: {0}")]
    UnsupportedPairing(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NonConvergence(_) | Error::BisectionFailure(_) | Error::NumericalFailure(_)
        )
    }
}
