//! Config-driven sweeps over topology size and accuracy, log-log rate fits
//! and report files.
//!
//! A config is JSON:
//!
//! ```json
//! {
//!   "name": "case1-path",
//!   "topology": {"kind": "path", "m": [8, 16, 32, 64], "n": 1, "seed": 0},
//!   "objective": {"name": "quadratic", "params": {}},
//!   "case": 1,
//!   "eps": [1e-6],
//!   "expect": [{"sweep": "m", "slope": 1.0, "tolerance": 0.15}]
//! }
//! ```
//!
//! Optional keys: `mode`, `chebyshev`, `condition`, `inexact`, `inner_tol`,
//! `max_iters`, `output`.

mod fit;
mod report;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    build_laplacian, chebyshev_accelerate, generate_topology, ChebyshevDegree, InteractionOperator, TopologyKind,
    DEFAULT_EIGEN_TOL,
};
use crate::objectives::ZooSpec;
use crate::solver::{solve_case, Case, ConvergenceReport, Mode, SolverConfig, SolverError, Status};

pub use fit::{fit_rate_exponent, RateFit, Sweep, SweepPoint};
pub use report::{emit_report, load_summary, run_config, FitCheck, Summary, SUMMARY_FILE};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("rate fit needs at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("cannot fit: {0}")]
    Fit(String),
    #[error("nothing to report")]
    EmptyReport,
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologySweep {
    pub kind: TopologyKind,
    pub m: Vec<usize>,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> usize {
    1
}

/// An asserted log-log slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub sweep: Sweep,
    pub slope: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub topology: TopologySweep,
    pub objective: ZooSpec,
    pub case: Case,
    pub eps: Vec<f64>,
    #[serde(default)]
    pub mode: Mode,
    /// Replace `W` by its Chebyshev polynomial of automatic degree.
    #[serde(default)]
    pub chebyshev: bool,
    #[serde(default)]
    pub condition: bool,
    #[serde(default)]
    pub inexact: bool,
    #[serde(default)]
    pub inner_tol: Option<f64>,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub expect: Vec<Expectation>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_name() -> String {
    "experiment".into()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ExperimentError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |s: String| Err(ExperimentError::Config(s));
        if self.topology.m.is_empty() {
            return bad("topology.m is empty".into());
        }
        if let Some(&m) = self.topology.m.iter().find(|&&m| m < 2) {
            return bad(format!("topology size {m} is below 2"));
        }
        if self.topology.n == 0 {
            return bad("topology.n must be positive".into());
        }
        if self.eps.is_empty() {
            return bad("eps is empty".into());
        }
        if let Some(e) = self.eps.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
            return bad(format!("eps {e} is not positive"));
        }
        if let Some(x) = self.expect.iter().find(|x| !(x.tolerance > 0.0) || !x.slope.is_finite()) {
            return bad(format!("expectation {x:?} needs a finite slope and a positive tolerance"));
        }
        Ok(())
    }

    /// Solver settings for one accuracy.
    pub fn solver_config(&self, eps: f64) -> SolverConfig {
        let mut c = SolverConfig::new(self.case, eps);
        c.mode = self.mode;
        c.condition = self.condition;
        c.inexact = self.inexact;
        if let Some(t) = self.inner_tol {
            c.inner_tol = t;
        }
        if let Some(n) = self.max_iters {
            c.max_iters = n;
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Failed,
}

/// Flat per-cell record; what `summary.json` stores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub m: usize,
    pub eps: f64,
    pub chi: Option<f64>,
    pub status: CellStatus,
    pub error: Option<String>,
    pub iterations: Option<usize>,
    pub n_comm: Option<usize>,
    pub n_grad: Option<usize>,
    pub budget: Option<usize>,
    pub final_gap_surrogate: Option<f64>,
    pub final_feasibility: Option<f64>,
    pub final_true_gap: Option<f64>,
    pub trace_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub summary: CellSummary,
    /// Present for completed runs and for runs that exhausted their budget.
    pub report: Option<ConvergenceReport>,
}

fn run_cell(cfg: &ExperimentConfig, m: usize, eps: f64) -> CellReport {
    let mut summary = CellSummary {
        m,
        eps,
        chi: None,
        status: CellStatus::Failed,
        error: None,
        iterations: None,
        n_comm: None,
        n_grad: None,
        budget: None,
        final_gap_surrogate: None,
        final_feasibility: None,
        final_true_gap: None,
        trace_file: None,
    };
    let t = &cfg.topology;
    let setup = || -> Result<_, SolverError> {
        let g = generate_topology(t.kind, m, t.seed)?;
        let w = build_laplacian(&g, t.n, DEFAULT_EIGEN_TOL)?;
        let f = cfg.objective.build(m, t.n, t.seed)?;
        let op: Box<dyn InteractionOperator> =
            if cfg.chebyshev { Box::new(chebyshev_accelerate(&w, ChebyshevDegree::Auto)?) } else { Box::new(w) };
        Ok((f, op))
    };
    let result = setup().and_then(|(f, op)| {
        summary.chi = Some(op.spectral().chi);
        solve_case(&f, op.as_ref(), &cfg.solver_config(eps)).map(|out| out.report)
    });
    let report = match result {
        Ok(r) => {
            summary.status = CellStatus::Ok;
            Some(r)
        }
        Err(SolverError::Budget { report, .. }) => {
            summary.error = Some(format!("iteration budget of {} exhausted", report.iterations));
            Some(*report)
        }
        Err(e) => {
            summary.error = Some(e.to_string());
            None
        }
    };
    if let Some(r) = &report {
        summary.iterations = Some(r.iterations);
        summary.n_comm = Some(r.n_comm);
        summary.n_grad = Some(r.n_grad);
        summary.budget = r.constants.budget;
        summary.final_gap_surrogate = r.final_gap_surrogate;
        summary.final_feasibility = Some(r.final_feasibility);
        summary.final_true_gap = r.final_true_gap;
        if r.status == Status::BudgetExhausted {
            summary.status = CellStatus::Failed;
        }
    }
    CellReport { summary, report }
}

/// One cell per `(m, eps)` pair, sizes outermost. Solver failures are kept
/// in the cell and do not stop the sweep.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<CellReport>, ExperimentError> {
    cfg.validate()?;
    let mut cells = Vec::with_capacity(cfg.topology.m.len() * cfg.eps.len());
    for &m in &cfg.topology.m {
        for &eps in &cfg.eps {
            cells.push(run_cell(cfg, m, eps));
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(text).unwrap()
    }

    const BASE: &str = r#"{
        "topology": {"kind": "path", "m": [8, 16, 32]},
        "objective": {"name": "quadratic", "params": {}},
        "case": 1,
        "eps": [1e-6]
    }"#;

    #[test]
    fn one_cell_per_size_and_eps() {
        let cells = run_experiment(&config(BASE)).unwrap();
        assert_eq!(cells.len(), 3);
        assert!(cells.iter().all(|c| c.summary.status == CellStatus::Ok));
        assert_eq!(cells.iter().map(|c| c.summary.m).collect::<Vec<_>>(), vec![8, 16, 32]);
    }

    #[test]
    fn unknown_zoo_entry_is_a_config_error() {
        let text = BASE.replace("\"quadratic\"", "\"rosenbrock\"");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(ExperimentError::Config(_))));
    }

    #[test]
    fn empty_lists_rejected() {
        let text = BASE.replace("[8, 16, 32]", "[]");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(ExperimentError::Config(_))));
        let text = BASE.replace("[1e-6]", "[]");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(ExperimentError::Config(_))));
    }

    #[test]
    fn solver_errors_stay_in_their_cell() {
        // case 1 needs strong convexity, absolute values have none
        let text = BASE.replace("\"quadratic\"", "\"absolute\"");
        let cells = run_experiment(&config(&text)).unwrap();
        assert_eq!(cells.len(), 3);
        assert!(cells.iter().all(|c| c.summary.status == CellStatus::Failed && c.summary.error.is_some()));
    }
}
