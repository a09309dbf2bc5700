//! Network topologies and the operators built from them.
//!
//! A [`Graph`] is a connected undirected simple graph. [`build_laplacian`]
//! turns it into an [`InteractionMatrix`]: the Laplacian `W̄`, its spectrum, and
//! the implicit Kronecker lift `W = W̄ ⊗ I_n` acting on stacked vectors.
//! [`chebyshev_accelerate`] wraps an interaction matrix into a polynomial
//! operator `P_K(W̄)` with a flattened nonzero spectrum.

mod chebyshev;
mod interaction;
mod topology;

use thiserror::Error;

pub use chebyshev::{chebyshev_accelerate, ChebyshevDegree, ChebyshevOperator, ChebyshevPolynomial};
pub(crate) use interaction::laplacian_row;
pub use interaction::{build_laplacian, InteractionMatrix, InteractionOperator, SpectralData, DEFAULT_EIGEN_TOL};
pub use topology::{generate_topology, Graph, TopologyKind, TopologySpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("invalid graph size {0}: at least two nodes are required")]
    InvalidSize(usize),
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("random topology not connected after {0} attempts")]
    GenerationFailed(usize),
    #[error("graph is disconnected: {zero_eigenvalues} eigenvalues below tolerance")]
    Disconnected { zero_eigenvalues: usize },
    #[error("block dimension must be positive")]
    InvalidBlockDim,
    #[error("shape mismatch: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("invalid Chebyshev degree {0}")]
    InvalidDegree(usize),
    #[error("i/o: {0}")]
    Io(String),
    #[error("cannot parse topology: {0}")]
    Parse(String),
}
