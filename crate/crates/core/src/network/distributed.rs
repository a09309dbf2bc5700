use std::time::Instant;

use super::{Network, NetworkError, RoundRow};
use crate::graph::InteractionOperator;
use crate::linalg::{extrapolate, norm};
use crate::objectives::{ConjugateOracle, Constraint, PrimalResponse, RegularizedObjective, SeparableObjective};
use crate::solver::{
    dual_step, inexact_node_argmax, momentum_at, prepare_case, ConvergenceReport, Mode, RunConstants, SolverConfig,
    SolverError, Status, TraceRow,
};

#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    /// `(x*_1(z_N^1), ..., x*_m(z_N^m))`.
    pub x: Vec<f64>,
    pub report: ConvergenceReport,
    pub network: Network,
    pub round_trace: Vec<RoundRow>,
}

fn node_response(
    f: &RegularizedObjective,
    oracle: ConjugateOracle,
    i: usize,
    u_i: &[f64],
) -> Result<PrimalResponse, NetworkError> {
    Ok(match oracle {
        ConjugateOracle::Explicit => {
            PrimalResponse { x: f.node_conjugate_argmax(i, u_i)?, grad_calls: 0, comm_rounds: 0 }
        }
        ConjugateOracle::Inexact { delta } => inexact_node_argmax(f, i, u_i, delta)?,
    })
}

/// Runs the dual fast gradient method node by node.
///
/// Each iteration every node computes `x*_i(z_tilde_i)`, the network applies
/// the consensus operator through neighbor exchanges, and each node updates
/// ```text
/// z_i       <- z_tilde_i - ((W x)_i + mu_hat z_tilde_i) / L_phi
/// z_tilde_i <- z_i_new + beta (z_i_new - z_i_old)
/// ```
/// The scalars `L_phi`, `mu_phi`, `mu_hat` and the iteration count are
/// common knowledge fixed before the run; they are the ones
/// [`prepare_case`] computes for the centralized solver, and the run lasts
/// `min(budget, cfg.max_iters)` iterations like strict mode.
///
/// The primal `x*_i(z_i)` is also evaluated at every iteration. It takes no
/// communication; the centralized solver evaluates the same quantity, so
/// `report.iterates` (when requested) line up with its strict-mode iterates.
pub fn run_distributed_dual_fgm(
    f: &SeparableObjective,
    op: &dyn InteractionOperator,
    cfg: &SolverConfig,
) -> Result<SimulationOutcome, NetworkError> {
    let start = Instant::now();
    let setup = prepare_case(f, op, cfg)?;
    if setup.objective.condition().is_some() {
        return Err(NetworkError::Unsupported(
            "the condition term couples neighbors inside the conjugate; run it centralized".into(),
        ));
    }
    let d = setup.dual(op)?;
    let (l_phi, mu_phi, mu_hat) = (d.l_phi(), d.mu_phi(), d.mu_hat());
    if !l_phi.is_finite() {
        return Err(SolverError::InvalidConfig("dual is not smooth: the primal objective needs mu > 0".into()).into());
    }
    let n_iters = setup.iteration_cap(cfg);
    let obj = &setup.objective;
    let oracle = setup.oracle;
    let (m, n) = (op.num_nodes(), op.block_dim());
    let poly = op.chebyshev().copied();
    let rounds = op.rounds_per_apply();

    let mut net = Network::new(op.graph().clone(), n)?;
    let mut trace = Vec::new();
    let mut round_trace = Vec::new();
    let mut iterates = Vec::new();
    let (mut n_grad, mut n_conj) = (0, 0);
    let f_opt = setup.reference.as_ref().map(|s| s.f_opt);

    let mut k = 0;
    loop {
        // local primal recovery x*_i(z_i); counted only for the returned point
        let last = k == n_iters;
        let mut xk = Vec::with_capacity(m * n);
        for i in 0..m {
            let r = node_response(obj, oracle, i, &net.node(i).z.clone())?;
            if last {
                n_grad += r.grad_calls;
            }
            xk.extend_from_slice(&r.x);
            net.node_mut(i).x = r.x;
        }
        // n_conj counts network-wide evaluations, like the centralized solver
        if last {
            n_conj += 1;
        }
        for i in 0..m {
            let s = net.node(i);
            round_trace.push(RoundRow { round: net.rounds(), node: i, z_norm: norm(&s.z), x_norm: norm(&s.x) });
        }
        // harness-side metrics
        let feas = d.residual(&xk)?;
        let true_gap = match f_opt {
            Some(fs) => Some(f.evaluate(&xk)? - fs),
            None => None,
        };
        trace.push(TraceRow { k, gap_surrogate: None, feasibility: feas, true_gap, n_comm: net.rounds(), n_grad });
        if cfg.record_iterates {
            iterates.push(xk.clone());
        }
        if last {
            let g = d.gram_spectral();
            let k_const = obj.constants();
            let fin = |v: f64| v.is_finite().then_some(v);
            let constants = RunConstants {
                mu: fin(k_const.mu),
                l: fin(k_const.l),
                m_lip: fin(k_const.m_lip),
                mu_phi: fin(mu_phi),
                l_phi: fin(l_phi),
                mu_hat: fin(mu_hat),
                mu_primal: obj.primal().map(|p| p.0),
                alpha: None,
                r: Some(setup.r),
                r_x: setup.r_x,
                eps: Some(setup.eps),
                eps_gap: Some(setup.eps_gap),
                eps_feas: fin(setup.eps_feas),
                lambda_max: Some(g.lambda_max),
                lambda_min_pos: Some(g.lambda_min_pos),
                chi: Some(g.chi),
                rounds_per_apply: rounds,
                budget: Some(setup.budget),
            };
            let report = ConvergenceReport {
                case: Some(setup.case),
                mode: Mode::StrictDistributed,
                status: Status::FixedBudget,
                iterations: k,
                n_comm: net.rounds(),
                n_grad,
                n_conj,
                final_gap_surrogate: None,
                final_feasibility: feas,
                final_true_gap: true_gap,
                max_kernel_component: None,
                constants,
                trace,
                wall_time: start.elapsed(),
                iterates,
            };
            return Ok(SimulationOutcome { x: xk, report, network: net, round_trace });
        }

        // x*_i(z_tilde_i), then one application of the consensus operator
        let mut xt = Vec::with_capacity(m);
        for i in 0..m {
            let r = node_response(obj, oracle, i, &net.node(i).z_tilde.clone())?;
            n_grad += r.grad_calls;
            xt.push(r.x);
        }
        n_conj += 1;
        let wx = match d.constraint() {
            Constraint::SqrtLaplacian => net.apply_operator(poly.as_ref(), &xt)?,
            Constraint::Laplacian => {
                let once = net.apply_operator(poly.as_ref(), &xt)?;
                net.apply_operator(poly.as_ref(), &once)?
            }
        };
        let beta = momentum_at(k, l_phi, mu_phi);
        for (i, wx_i) in wx.iter().enumerate() {
            let s = net.node_mut(i);
            let zn = dual_step(&s.z_tilde, wx_i, mu_hat, l_phi);
            s.z_tilde = extrapolate(&zn, &s.z, beta);
            s.z = zn;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_laplacian, generate_topology, TopologyKind, DEFAULT_EIGEN_TOL};
    use crate::network::audit_locality;
    use crate::objectives::QuadraticNode;
    use crate::solver::{solve_case, Case};

    #[test]
    fn two_nodes_average() {
        let w = build_laplacian(&generate_topology(TopologyKind::Path, 2, 0).unwrap(), 1, DEFAULT_EIGEN_TOL).unwrap();
        let f = SeparableObjective::from_nodes(vec![
            QuadraticNode::isotropic(1.0, vec![0.0]).unwrap(),
            QuadraticNode::isotropic(1.0, vec![2.0]).unwrap(),
        ])
        .unwrap();
        let mut cfg = SolverConfig::new(Case::One, 1e-10);
        cfg.mode = Mode::StrictDistributed;
        let out = run_distributed_dual_fgm(&f, &w, &cfg).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-9 && (out.x[1] - 1.0).abs() < 1e-9);
        assert_eq!(out.network.scalars_sent(), out.network.rounds() * 2);
        assert!(audit_locality(&out.network).is_empty());
    }

    #[test]
    fn matches_centralized_strict_bitwise() {
        let w = build_laplacian(&generate_topology(TopologyKind::Path, 5, 0).unwrap(), 2, DEFAULT_EIGEN_TOL).unwrap();
        let f = SeparableObjective::from_nodes(
            (0..5)
                .map(|i| QuadraticNode::new(vec![1.0 + i as f64, 0.5], vec![i as f64 * 0.3, -1.0 + i as f64]).unwrap())
                .collect(),
        )
        .unwrap();
        let mut cfg = SolverConfig::new(Case::One, 1e-8);
        cfg.mode = Mode::StrictDistributed;
        cfg.max_iters = 200;
        cfg.record_iterates = true;
        let sim = run_distributed_dual_fgm(&f, &w, &cfg).unwrap();
        let cen = solve_case(&f, &w, &cfg).unwrap();
        assert_eq!(sim.report.iterates, cen.report.iterates);
        assert_eq!(sim.report.n_comm, cen.report.n_comm);
        assert_eq!(sim.report.n_conj, cen.report.n_conj);
        assert_eq!(sim.network.scalars_sent(), sim.network.rounds() * 2 * 4 * 2);
    }
}
