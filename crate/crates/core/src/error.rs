use thiserror::Error;

use crate::experiments::ExperimentError;
use crate::graph::TopologyError;
use crate::objectives::ObjectiveError;
use crate::solver::SolverError;

/// Crate-level error, for callers that do not care which layer failed.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}
