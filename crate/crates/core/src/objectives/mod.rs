//! Separable objectives, their conjugate oracles and the dual function.
//!
//! Every node `i` owns an `f_i : R^n -> R` implementing [`NodeObjective`].
//! Constants are declared by the author of the objective: `mu` (strong
//! convexity), `l` (gradient Lipschitz) and `m_lip` (function Lipschitz), with
//! `f64::INFINITY` meaning "not available" and `0.0` meaning "not strongly
//! convex".
//!
//! Subgradient selection for kinks is fixed to `sign(0) = 0`.

mod dual;
mod nodes;
mod regularized;
mod separable;
mod zoo;

use thiserror::Error;

use crate::graph::TopologyError;

pub use dual::{bound_dual_radius, ConjugateOracle, Constraint, DualFunction, PrimalResponse, SmoothedPenalty};
pub use nodes::{AbsoluteNode, HuberNode, QuadraticAbsNode, QuadraticNode, SoftplusNode};
pub use regularized::{regularize, ConditionBounds, RegularizationMode, RegularizedObjective};
pub use separable::SeparableObjective;
pub use zoo::ZooSpec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObjectiveError {
    #[error("shape mismatch: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("objective has no nodes")]
    Empty,
    #[error("node {node} has dimension {got}, expected {expected}")]
    NodeDimension { node: usize, expected: usize, got: usize },
    #[error("node {node} has no explicit conjugate oracle")]
    NotDualFriendly { node: usize },
    #[error("conjugate maximizer at node {node} is not unique or does not exist")]
    IllPosed { node: usize },
    #[error("regularization weight must be positive, got {0}")]
    NonPositiveWeight(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("missing constant: {0}")]
    MissingConstant(&'static str),
    #[error("operation not supported: {0}")]
    Unsupported(String),
    #[error("smallest nonzero eigenvalue must be positive")]
    ZeroSpectralGap,
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Declared constants of one node or of an aggregate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Constants {
    pub mu: f64,
    pub l: f64,
    pub m_lip: f64,
}

/// Proximal term `(weight / 2) ||v - anchor||^2` subtracted inside the
/// conjugate maximization.
#[derive(Debug, Clone, Copy)]
pub struct Proximal<'a> {
    pub weight: f64,
    pub anchor: &'a [f64],
}

/// One agent's private objective.
pub trait NodeObjective: std::fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, v: &[f64]) -> f64;

    /// Gradient, or a subgradient with `sign(0) = 0` at kinks.
    fn gradient(&self, v: &[f64]) -> Vec<f64>;

    fn constants(&self) -> Constants;

    /// Whether [`conjugate_argmax`](Self::conjugate_argmax) has a closed form.
    fn is_dual_friendly(&self) -> bool {
        false
    }

    /// `f(v) = sum_c g_c(v_c)`, i.e. coordinate `c` of the gradient only
    /// depends on `v_c`. The reference oracle relies on this.
    fn is_coordinate_separable(&self) -> bool {
        false
    }

    /// `argmax_v <u, v> - f(v) - prox(v)`.
    ///
    /// Errors with `NotDualFriendly` when no closed form exists and with
    /// `IllPosed` when the maximizer is not unique. The `node` field of the
    /// error is filled in by [`SeparableObjective`].
    fn conjugate_argmax(&self, u: &[f64], prox: Option<Proximal<'_>>) -> Result<Vec<f64>, ObjectiveError> {
        let _ = (u, prox);
        Err(ObjectiveError::NotDualFriendly { node: 0 })
    }
}
