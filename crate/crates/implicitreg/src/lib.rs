//! Graph analytics around diffusion processes and the optimization problems
//! they solve.
//!
//! The crate provides:
//!
//! - [`graph`]: an immutable CSR graph with its derived operators (adjacency,
//!   degree, combinatorial and normalized Laplacians, random and lazy walks),
//!   edge-list ingestion and deterministic synthetic generators.
//! - [`numerics`]: dense symmetric eigendecomposition, conjugate-gradient
//!   solves, and a projected-gradient solver over the trace-one PSD set used
//!   as an independent optimization oracle.
//! - [`diffusion`]: heat-kernel, personalized-PageRank and lazy-random-walk
//!   dynamics, plus a power method with deflation.
//! - [`regularize`]: exact solutions of the regularized trace objective over
//!   density matrices, and equivalence checks against diffusion operators.
//! - [`partition`]: conductance, sweep cuts, spectral partitioning, exact
//!   max-flow and flow-based quotient-cut refinement, cluster niceness
//!   metrics.
//! - [`local`]: strongly-local clustering via the push algorithm, truncated
//!   random walks, and the locally-biased spectral program.

pub mod diffusion;
pub mod error;
pub mod graph;
pub mod local;
pub mod numerics;
pub mod partition;
pub mod regularize;

pub use error::{Error, Result};
pub use graph::{
    apply_matrix, generate, load_edge_list, preprocess, Graph, GraphFamily, IdMap, MatrixKind,
    NodeVector, SeedDistribution,
};
