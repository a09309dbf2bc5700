//! # netopt
//!
//! Accelerated dual methods for distributed convex optimization over fixed,
//! connected, undirected networks.
//!
//! Each of `m` agents holds a private convex function `f_i : R^n -> R` and the
//! network has to agree on a minimizer of `F(x) = sum_i f_i(x_i)` subject to
//! consensus `x_1 = ... = x_m`. Consensus is written as the linear constraint
//! `sqrt(W) x = 0`, where `W` is the graph Laplacian lifted to blocks of size
//! `n`, and the Lagrange dual is minimized with Nesterov's fast gradient
//! method. After the change of variables `z = sqrt(W) y` every iteration is a
//! single round of neighbor-to-neighbor communication.
//!
//! ## Layout
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | topologies, Laplacians, spectral data, Chebyshev operators |
//! | [`objectives`] | node objectives, separable sums, dual function, regularizers |
//! | [`solver`] | fast gradient method, dual FGM, the four regimes, budgets |
//! | [`network`] | locality-enforcing message-passing simulator, gossip baselines |
//! | [`experiments`] | config-driven sweeps, rate fits, report files |
//! | [`reference`] | centralized verification oracle (optimum, radii) |
//!
//! ## Singular value convention
//!
//! Following the usual convention in this line of work, `sigma_max(A)` and
//! `sigma_min(A)` denote the largest and the smallest *nonzero eigenvalue of
//! `A^T A`*, not singular values. With `A = sqrt(W)` they are simply the
//! extreme nonzero eigenvalues of the Laplacian.

pub mod experiments;
pub mod graph;
pub(crate) mod linalg;
pub mod network;
pub mod objectives;
pub mod reference;
pub mod solver;

mod error;

pub use error::Error;
pub use graph::{
    build_laplacian, chebyshev_accelerate, generate_topology, ChebyshevDegree, ChebyshevOperator, Graph,
    InteractionMatrix, InteractionOperator, SpectralData, TopologyError, TopologyKind, TopologySpec,
};
pub use objectives::{
    DualFunction, NodeObjective, ObjectiveError, RegularizationMode, RegularizedObjective, SeparableObjective,
};
pub use solver::{
    dual_fgm, fgm, iteration_budget, solve_case, Case, ConvergenceReport, Mode, SolverConfig, SolverError,
};
