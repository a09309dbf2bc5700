use std::time::Instant;

use super::{finite, ConvergenceReport, Mode, RunConstants, SolverConfig, SolverError, Status, TraceRow};
use crate::graph::InteractionOperator;
use crate::linalg::{all_finite, extrapolate, momentum, norm};
use crate::objectives::{Constraint, DualFunction, PrimalResponse};

/// Gradient step on the transformed dual variable,
/// `z_tilde - (A^T A x + mu_hat z_tilde) / L_phi`, elementwise.
pub(crate) fn dual_step(zt: &[f64], gram_x: &[f64], mu_hat: f64, l_phi: f64) -> Vec<f64> {
    zt.iter().zip(gram_x).map(|(z, g)| z - (g + mu_hat * z) / l_phi).collect()
}

/// Constant momentum when the dual is strongly convex, `k / (k + 3)` otherwise.
pub(crate) fn momentum_at(k: usize, l_phi: f64, mu_phi: f64) -> f64 {
    if mu_phi > 0.0 {
        momentum(l_phi, mu_phi)
    } else {
        k as f64 / (k as f64 + 3.0)
    }
}

#[derive(Debug, Clone)]
pub struct DualOutcome {
    /// Primal recovery `x*(z_N)`.
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    /// Dual iterate `y_N`, analysis mode only.
    pub y: Option<Vec<f64>>,
    pub report: ConvergenceReport,
}

struct Counters {
    comm: usize,
    grad: usize,
    conj: usize,
}

impl Counters {
    fn take(&mut self, r: PrimalResponse, counted: bool) -> Vec<f64> {
        if counted {
            self.conj += 1;
            self.grad += r.grad_calls;
            self.comm += r.comm_rounds;
        }
        r.x
    }
}

fn consensus_component(y: &[f64], m: usize, n: usize) -> f64 {
    let mut total = 0.0;
    for c in 0..n {
        let mean = (0..m).map(|i| y[i * n + c]).sum::<f64>() / m as f64;
        total += mean * mean * m as f64;
    }
    total.sqrt()
}

/// Fast gradient method on the dual, run in `z = A^T y`.
///
/// Every iteration evaluates `x*(z_tilde_k)`, applies `A^T A` once (the only
/// communication) and updates `z` and `z_tilde`. In analysis mode `y` and
/// `y_tilde` are carried along through the dense `A` so that the stopping
/// test can use `||y_k||`; the `z` recursion, and therefore every primal
/// iterate, is the same in both modes.
///
/// Analysis mode stops once `||y_k|| ||A x_k|| < eps` and `||A x_k|| <
/// eps_tilde` both hold, and returns a budget error carrying the trace if
/// `max_iters` runs out first. Strict mode runs exactly `max_iters`
/// iterations.
pub fn dual_fgm(d: &DualFunction<'_>, cfg: &SolverConfig, f_opt: Option<f64>) -> Result<DualOutcome, SolverError> {
    cfg.validate()?;
    let eps_gap = cfg.eps;
    let eps_feas =
        cfg.eps_tilde.ok_or_else(|| SolverError::InvalidConfig("dual_fgm needs an explicit eps_tilde".into()))?;
    let (l_phi, mu_phi, mu_hat) = (d.l_phi(), d.mu_phi(), d.mu_hat());
    if !l_phi.is_finite() {
        return Err(SolverError::InvalidConfig("dual is not smooth: the primal objective needs mu > 0".into()));
    }
    let start = Instant::now();
    let op: &dyn InteractionOperator = d.operator();
    let (m, n) = (op.num_nodes(), op.block_dim());
    let rounds = match d.constraint() {
        Constraint::SqrtLaplacian => op.rounds_per_apply(),
        Constraint::Laplacian => 2 * op.rounds_per_apply(),
    };
    let gram_apply = |x: &[f64]| -> Result<Vec<f64>, SolverError> {
        Ok(match d.constraint() {
            Constraint::SqrtLaplacian => op.apply(x)?,
            Constraint::Laplacian => op.apply(&op.apply(x)?)?,
        })
    };
    let base = d.objective().base();
    let analysis = cfg.mode == Mode::Analysis;
    let n_iters = cfg.max_iters;

    let dim = m * n;
    let mut z = vec![0.0; dim];
    let mut zt = vec![0.0; dim];
    let (mut y, mut yt) = if analysis { (vec![0.0; dim], vec![0.0; dim]) } else { (Vec::new(), Vec::new()) };
    let mut cnt = Counters { comm: 0, grad: 0, conj: 0 };
    let mut trace = Vec::new();
    let mut iterates = Vec::new();
    let mut kernel: f64 = 0.0;

    let k_const = d.objective().constants();
    let g = d.gram_spectral();
    let constants = RunConstants {
        mu: finite(k_const.mu),
        l: finite(k_const.l),
        m_lip: finite(k_const.m_lip),
        mu_phi: finite(mu_phi),
        l_phi: finite(l_phi),
        mu_hat: finite(mu_hat),
        mu_primal: d.objective().primal().map(|p| p.0),
        alpha: d.objective().condition().map(|c| c.0),
        eps_gap: Some(eps_gap),
        eps_feas: finite(eps_feas),
        lambda_max: Some(g.lambda_max),
        lambda_min_pos: Some(g.lambda_min_pos),
        chi: Some(g.chi),
        rounds_per_apply: rounds,
        ..RunConstants::default()
    };

    let mut k = 0;
    loop {
        let last = !analysis && k == n_iters;
        let xk = cnt.take(d.primal_response(&z)?, analysis || last);
        if !all_finite(&xk) {
            return Err(SolverError::Divergence { iteration: k });
        }
        let feas = d.residual(&xk)?;
        let gap = analysis.then(|| norm(&y) * feas);
        let true_gap = match f_opt {
            Some(fs) => Some(base.evaluate(&xk)? - fs),
            None => None,
        };
        if analysis {
            kernel = kernel.max(consensus_component(&y, m, n));
        }
        trace.push(TraceRow { k, gap_surrogate: gap, feasibility: feas, true_gap, n_comm: cnt.comm, n_grad: cnt.grad });
        if cfg.record_iterates {
            iterates.push(xk.clone());
        }

        let converged = analysis && gap.is_some_and(|g| g < eps_gap) && feas < eps_feas;
        if converged || k == n_iters {
            let status = if converged {
                Status::Converged
            } else if analysis {
                Status::BudgetExhausted
            } else {
                Status::FixedBudget
            };
            let report = ConvergenceReport {
                case: None,
                mode: cfg.mode,
                status,
                iterations: k,
                n_comm: cnt.comm,
                n_grad: cnt.grad,
                n_conj: cnt.conj,
                final_gap_surrogate: gap,
                final_feasibility: feas,
                final_true_gap: true_gap,
                max_kernel_component: analysis.then_some(kernel),
                constants,
                trace,
                wall_time: start.elapsed(),
                iterates,
            };
            if status == Status::BudgetExhausted {
                return Err(SolverError::Budget { report: Box::new(report), x: xk });
            }
            return Ok(DualOutcome { x: xk, z, y: analysis.then_some(y), report });
        }

        let xt = cnt.take(d.primal_response(&zt)?, true);
        let wx = gram_apply(&xt)?;
        cnt.comm += rounds;
        let beta = momentum_at(k, l_phi, mu_phi);
        let zn = dual_step(&zt, &wx, mu_hat, l_phi);
        zt = extrapolate(&zn, &z, beta);
        z = zn;
        if analysis {
            let ax = d.apply_a(&xt)?;
            let yn = dual_step(&yt, &ax, mu_hat, l_phi);
            yt = extrapolate(&yn, &y, beta);
            y = yn;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_laplacian, generate_topology, InteractionMatrix, TopologyKind, DEFAULT_EIGEN_TOL};
    use crate::objectives::{QuadraticNode, RegularizedObjective, SeparableObjective};
    use crate::solver::Case;

    fn setup(kind: TopologyKind, b: &[f64]) -> (InteractionMatrix, RegularizedObjective) {
        let w = build_laplacian(&generate_topology(kind, b.len(), 0).unwrap(), 1, DEFAULT_EIGEN_TOL).unwrap();
        let f = SeparableObjective::from_nodes(
            b.iter().map(|&v| QuadraticNode::isotropic(1.0, vec![v]).unwrap()).collect(),
        )
        .unwrap();
        (w, f.into())
    }

    #[test]
    fn k2_reaches_the_average() {
        let (w, f) = setup(TopologyKind::Path, &[0.0, 2.0]);
        let d = DualFunction::new(&f, &w).unwrap();
        let mut cfg = SolverConfig::new(Case::One, 1e-8);
        cfg.eps_tilde = Some(1e-8);
        let out = dual_fgm(&d, &cfg, Some(1.0)).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-8 && (out.x[1] - 1.0).abs() < 1e-8);
        assert!(out.report.final_true_gap.unwrap().abs() <= 1e-8);
        assert_eq!(out.report.trace.len(), out.report.iterations + 1);
    }

    #[test]
    fn consensual_data_stops_immediately() {
        let (w, f) = setup(TopologyKind::Path, &[0.4, 0.4, 0.4]);
        let d = DualFunction::new(&f, &w).unwrap();
        let mut cfg = SolverConfig::new(Case::One, 1e-8);
        cfg.eps_tilde = Some(1e-8);
        let out = dual_fgm(&d, &cfg, None).unwrap();
        assert_eq!(out.report.iterations, 0);
        assert!(out.y.unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn perfectly_conditioned_dual_takes_one_step() {
        // complete graph, unit quadratics: L_phi = mu_phi = m
        let (w, f) = setup(TopologyKind::Complete, &[0.3, -1.0, 2.0, 0.5]);
        let d = DualFunction::new(&f, &w).unwrap();
        assert!((d.l_phi() - d.mu_phi()).abs() < 1e-12);
        let mut cfg = SolverConfig::new(Case::One, 1e-10);
        cfg.eps_tilde = Some(1e-10);
        let out = dual_fgm(&d, &cfg, None).unwrap();
        assert_eq!(out.report.iterations, 1);
    }

    #[test]
    fn modes_agree_bitwise() {
        let (w, f) = setup(TopologyKind::Path, &[0.3, -1.0, 2.0, 0.5, 0.1]);
        let d = DualFunction::new(&f, &w).unwrap();
        let mut cfg = SolverConfig::new(Case::One, 1e-30);
        cfg.eps_tilde = Some(1e-30);
        cfg.max_iters = 60;
        cfg.record_iterates = true;
        let a = match dual_fgm(&d, &cfg, None) {
            Err(SolverError::Budget { report, .. }) => report,
            other => panic!("expected budget error, got {other:?}"),
        };
        cfg.mode = Mode::StrictDistributed;
        let s = dual_fgm(&d, &cfg, None).unwrap().report;
        assert_eq!(a.iterates, s.iterates);
        assert_eq!(s.status, Status::FixedBudget);
        assert!(a.max_kernel_component.unwrap() <= 1e-10);
    }
}
