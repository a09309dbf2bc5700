//! Fast gradient methods on the primal and on the dual.
//!
//! [`fgm`] is the plain constant-step method. [`dual_fgm`] runs it on the
//! dual function in the transformed variable `z = A^T y`, which is what every
//! node can update from neighbor data alone. [`solve_case`] picks the
//! regularization for each of the four smoothness/convexity regimes:
//!
//! | Case | Assumptions | Regularization |
//! |------|-------------|----------------|
//! | 1 | `mu > 0`, `L < inf` | none |
//! | 2 | `mu > 0`, `M < inf` | dual, `mu_hat = eps / R^2` |
//! | 3 | `L < inf` | primal, `eps / R_x^2` around `x*(0)` |
//! | 4 | `M < inf` | both |

mod budget;
mod cases;
mod dual;
mod fgm;
mod inexact;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::TopologyError;
use crate::objectives::{ConjugateOracle, ObjectiveError};

pub use budget::{iteration_budget, BudgetInputs, LEADING_CONSTANT};
pub use cases::{prepare_case, solve_case, CaseOutcome, CaseSetup};
pub use dual::{dual_fgm, DualOutcome};
pub(crate) use dual::{dual_step, momentum_at};
pub use fgm::{fgm, FgmOutcome, FgmStop};
pub use inexact::inexact_conjugate_solve;
pub(crate) use inexact::{inexact_argmax, inexact_node_argmax};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("case {case} needs {what}")]
    MissingConstant { case: Case, what: &'static str },
    #[error("non-finite iterate at iteration {iteration}; declared constants are probably wrong")]
    Divergence { iteration: usize },
    #[error("iteration budget of {} exhausted", .report.iterations)]
    Budget { report: Box<ConvergenceReport>, x: Vec<f64> },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// The four smoothness/convexity regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Case {
    One,
    Two,
    Three,
    Four,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::One, Case::Two, Case::Three, Case::Four];

    pub fn number(self) -> u8 {
        self.into()
    }

    pub fn primal_regularized(self) -> bool {
        matches!(self, Case::Three | Case::Four)
    }

    pub fn dual_regularized(self) -> bool {
        matches!(self, Case::Two | Case::Four)
    }
}

impl TryFrom<u8> for Case {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Case::One),
            2 => Ok(Case::Two),
            3 => Ok(Case::Three),
            4 => Ok(Case::Four),
            other => Err(format!("case must be 1, 2, 3 or 4, got {other}")),
        }
    }
}

impl From<Case> for u8 {
    fn from(c: Case) -> u8 {
        match c {
            Case::One => 1,
            Case::Two => 2,
            Case::Three => 3,
            Case::Four => 4,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// `Analysis` carries `y` next to `z` and stops on the residual test.
/// `StrictDistributed` only touches locally available quantities and runs a
/// fixed number of iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Analysis,
    StrictDistributed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub eps: f64,
    /// Feasibility target; `eps / R` when absent.
    #[serde(default)]
    pub eps_tilde: Option<f64>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub mode: Mode,
    /// Inner tolerance `delta` for inexact conjugate solves.
    #[serde(default = "default_inner_tol")]
    pub inner_tol: f64,
    pub case: Case,
    /// Forces inexact inner solves even for dual-friendly nodes.
    #[serde(default)]
    pub inexact: bool,
    /// Adds the condition-number regularizer with the default `alpha`.
    #[serde(default)]
    pub condition: bool,
    /// Known `R`; computed when absent.
    #[serde(default)]
    pub r: Option<f64>,
    /// Known `R_x`; computed when absent.
    #[serde(default)]
    pub r_x: Option<f64>,
    /// Keeps every primal iterate `x*(z_k)` in the report.
    #[serde(default)]
    pub record_iterates: bool,
}

fn default_max_iters() -> usize {
    1_000_000
}

fn default_inner_tol() -> f64 {
    1e-12
}

impl SolverConfig {
    pub fn new(case: Case, eps: f64) -> Self {
        SolverConfig {
            eps,
            eps_tilde: None,
            max_iters: default_max_iters(),
            mode: Mode::Analysis,
            inner_tol: default_inner_tol(),
            case,
            inexact: false,
            condition: false,
            r: None,
            r_x: None,
            record_iterates: false,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(SolverError::InvalidConfig(format!("eps must be positive, got {}", self.eps)));
        }
        if let Some(t) = self.eps_tilde {
            if !(t > 0.0) {
                return Err(SolverError::InvalidConfig(format!("eps_tilde must be positive, got {t}")));
            }
        }
        if self.max_iters == 0 {
            return Err(SolverError::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.inner_tol > 0.0) {
            return Err(SolverError::InvalidConfig("inner_tol must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn oracle(&self) -> ConjugateOracle {
        if self.inexact || self.condition {
            ConjugateOracle::Inexact { delta: self.inner_tol }
        } else {
            ConjugateOracle::Explicit
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    FixedBudget,
    BudgetExhausted,
}

/// One row per iterate `k = 0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    /// `||y_k|| ||A x_k||`; not available in strict mode.
    pub gap_surrogate: Option<f64>,
    pub feasibility: f64,
    /// `F(x_k) - F*` when the optimum is known.
    pub true_gap: Option<f64>,
    pub n_comm: usize,
    pub n_grad: usize,
}

/// Constants a run was configured with. Infinite values serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RunConstants {
    pub mu: Option<f64>,
    pub l: Option<f64>,
    pub m_lip: Option<f64>,
    pub mu_phi: Option<f64>,
    pub l_phi: Option<f64>,
    pub mu_hat: Option<f64>,
    pub mu_primal: Option<f64>,
    pub alpha: Option<f64>,
    pub r: Option<f64>,
    pub r_x: Option<f64>,
    pub eps: Option<f64>,
    pub eps_gap: Option<f64>,
    pub eps_feas: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lambda_min_pos: Option<f64>,
    pub chi: Option<f64>,
    pub rounds_per_apply: usize,
    pub budget: Option<usize>,
}

pub(crate) fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Everything a run measured. Wall time and iterates are not serialized, so
/// reports of identical runs compare equal byte for byte.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub case: Option<Case>,
    pub mode: Mode,
    pub status: Status,
    pub iterations: usize,
    pub n_comm: usize,
    pub n_grad: usize,
    pub n_conj: usize,
    pub final_gap_surrogate: Option<f64>,
    pub final_feasibility: f64,
    pub final_true_gap: Option<f64>,
    /// Largest norm of the consensus component of `y_k` (analysis mode).
    pub max_kernel_component: Option<f64>,
    pub constants: RunConstants,
    pub trace: Vec<TraceRow>,
    #[serde(skip)]
    pub wall_time: Duration,
    #[serde(skip)]
    pub iterates: Vec<Vec<f64>>,
}

// traces run to millions of rows; print their length only
impl fmt::Debug for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvergenceReport")
            .field("case", &self.case)
            .field("mode", &self.mode)
            .field("status", &self.status)
            .field("iterations", &self.iterations)
            .field("n_comm", &self.n_comm)
            .field("n_grad", &self.n_grad)
            .field("n_conj", &self.n_conj)
            .field("final_gap_surrogate", &self.final_gap_surrogate)
            .field("final_feasibility", &self.final_feasibility)
            .field("final_true_gap", &self.final_true_gap)
            .field("max_kernel_component", &self.max_kernel_component)
            .field("constants", &self.constants)
            .field("trace_len", &self.trace.len())
            .field("iterates_len", &self.iterates.len())
            .field("wall_time", &self.wall_time)
            .finish()
    }
}

impl ConvergenceReport {
    /// Writes the trace as CSV with columns
    /// `k,gap_surrogate,feasibility,true_gap_if_known,N_comm,N_grad`.
    pub fn write_trace_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "gap_surrogate", "feasibility", "true_gap_if_known", "N_comm", "N_grad"])?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for r in &self.trace {
            w.write_record([
                r.k.to_string(),
                opt(r.gap_surrogate),
                format!("{:e}", r.feasibility),
                opt(r.true_gap),
                r.n_comm.to_string(),
                r.n_grad.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
