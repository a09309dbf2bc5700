use super::budget::budget_for;
use super::{dual_fgm, Case, ConvergenceReport, Mode, SolverConfig, SolverError};
use crate::graph::{build_laplacian, InteractionOperator};
use crate::objectives::{
    bound_dual_radius, ConjugateOracle, DualFunction, RegularizationMode, RegularizedObjective, SeparableObjective,
};
use crate::reference::{consensus_optimum, exact_dual_radius, primal_radius, ReferenceSolution};

/// Everything a case run is parameterized by. Shared by the centralized
/// solver and the network simulator so both run on identical constants.
#[derive(Debug, Clone)]
pub struct CaseSetup {
    pub case: Case,
    pub objective: RegularizedObjective,
    /// `x*(0)`, the center of the primal regularizer (cases 3 and 4).
    pub anchor: Option<Vec<f64>>,
    pub reference: Option<ReferenceSolution>,
    pub r: f64,
    pub r_x: Option<f64>,
    pub eps: f64,
    /// Target for `||y|| ||A x||`. `eps / 2` in case 3, where the primal
    /// regularizer costs the other half. In case 4 the surrogate of the
    /// dual-regularized optimum is `mu_hat ||y||^2`, which is only known to be
    /// below `eps`, so the target stays at `eps`.
    pub eps_gap: f64,
    pub eps_feas: f64,
    pub budget: usize,
    pub oracle: ConjugateOracle,
}

impl CaseSetup {
    pub fn dual<'a>(&'a self, op: &'a dyn InteractionOperator) -> Result<DualFunction<'a>, SolverError> {
        Ok(DualFunction::new(&self.objective, op)?.with_oracle(self.oracle))
    }

    /// Number of iterations the run will be allowed.
    pub fn iteration_cap(&self, cfg: &SolverConfig) -> usize {
        match cfg.mode {
            Mode::Analysis => cfg.max_iters,
            Mode::StrictDistributed => self.budget.min(cfg.max_iters),
        }
    }

    fn fill(&self, report: &mut ConvergenceReport) {
        report.case = Some(self.case);
        report.constants.r = Some(self.r);
        report.constants.r_x = self.r_x;
        report.constants.eps = Some(self.eps);
        report.constants.budget = Some(self.budget);
    }
}

#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub x: Vec<f64>,
    pub report: ConvergenceReport,
    pub setup: CaseSetup,
}

fn check_case(case: Case, f: &SeparableObjective) -> Result<(), SolverError> {
    let k = f.constants();
    let missing = |what| Err(SolverError::MissingConstant { case, what });
    match case {
        Case::One | Case::Two if !(k.mu > 0.0) => missing("mu > 0"),
        Case::One | Case::Three if !k.l.is_finite() => missing("a finite L"),
        Case::Two | Case::Four if !k.m_lip.is_finite() => missing("a finite M"),
        _ => Ok(()),
    }
}

/// Resolves the radii, regularizers, targets and budget for a case.
///
/// `R` comes from `cfg.r`, else from the a-priori bound `M / sqrt(lambda_min)`
/// in the Lipschitz cases 2 and 4, else from the reference oracle. `R_x` comes
/// from `cfg.r_x`, else from the reference oracle. The reference oracle also
/// supplies `F*` for the true-gap column of the trace.
pub fn prepare_case(
    f: &SeparableObjective,
    op: &dyn InteractionOperator,
    cfg: &SolverConfig,
) -> Result<CaseSetup, SolverError> {
    cfg.validate()?;
    let case = cfg.case;
    if op.num_nodes() != f.num_nodes() || op.block_dim() != f.block_dim() {
        return Err(SolverError::InvalidConfig(format!(
            "objective has {} nodes of dimension {}, operator {} of dimension {}",
            f.num_nodes(),
            f.block_dim(),
            op.num_nodes(),
            op.block_dim()
        )));
    }
    check_case(case, f)?;
    let eps = cfg.eps;
    let plain = RegularizedObjective::plain(f.clone());

    let anchor = if case.primal_regularized() { Some(f.conjugate_argmax(&vec![0.0; f.dim()], None)?) } else { None };
    let reference =
        if f.is_coordinate_separable() { Some(consensus_optimum(&plain, anchor.as_deref())?) } else { None };

    let r = match cfg.r {
        Some(r) => r,
        None if case.dual_regularized() => bound_dual_radius(f.m_lip(), op.spectral())?,
        None => {
            let sol = reference.as_ref().ok_or(SolverError::MissingConstant { case, what: "R" })?;
            exact_dual_radius(&plain, op, &sol.x_opt)?
        }
    };
    let r_x = if case.primal_regularized() {
        let rx = match cfg.r_x {
            Some(v) => v,
            None => {
                let sol = reference.as_ref().ok_or(SolverError::MissingConstant { case, what: "R_x" })?;
                primal_radius(sol, anchor.as_deref().expect("anchor set for primal cases"))
            }
        };
        // any positive upper bound is admissible; an optimal anchor has R_x = 0
        Some(if rx > 0.0 { rx } else { 1.0 })
    } else {
        None
    };

    let mut objective = plain;
    if let (Some(rx), Some(a)) = (r_x, &anchor) {
        objective = objective.with(RegularizationMode::Primal {
            weight: RegularizationMode::primal_weight(eps, rx),
            anchor: a.clone(),
        })?;
    }
    if case.dual_regularized() {
        if !(r > 0.0) {
            return Err(SolverError::InvalidConfig("dual regularization needs R > 0".into()));
        }
        objective = objective.with(RegularizationMode::Dual { weight: RegularizationMode::dual_weight(eps, r) })?;
    }
    if cfg.condition {
        let lap = build_laplacian(op.graph(), op.block_dim(), op.spectral().eigen_tol)?;
        let alpha = RegularizationMode::condition_alpha(f, &lap);
        objective = objective.with(RegularizationMode::Condition { alpha, laplacian: lap })?;
    }

    let eps_gap = if case == Case::Three { eps / 2.0 } else { eps };
    let eps_feas = cfg.eps_tilde.unwrap_or(if r > 0.0 { eps / r } else { f64::INFINITY });
    let mut oracle = cfg.oracle();
    if !objective.is_dual_friendly() {
        oracle = ConjugateOracle::Inexact { delta: cfg.inner_tol };
    }
    let d = DualFunction::new(&objective, op)?;
    let budget = budget_for(d.l_phi(), d.mu_phi(), r, eps, eps_feas);

    Ok(CaseSetup { case, objective, anchor, reference, r, r_x, eps, eps_gap, eps_feas, budget, oracle })
}

/// Solves `min F(x)` s.t. consensus with the regularization of the given
/// case, returning an `(eps, eps/R)`-optimal point.
pub fn solve_case(
    f: &SeparableObjective,
    op: &dyn InteractionOperator,
    cfg: &SolverConfig,
) -> Result<CaseOutcome, SolverError> {
    let setup = prepare_case(f, op, cfg)?;
    let d = setup.dual(op)?;
    let run = SolverConfig {
        eps: setup.eps_gap,
        eps_tilde: Some(setup.eps_feas),
        max_iters: setup.iteration_cap(cfg),
        ..cfg.clone()
    };
    let f_opt = setup.reference.as_ref().map(|s| s.f_opt);
    match dual_fgm(&d, &run, f_opt) {
        Ok(out) => {
            let mut report = out.report;
            setup.fill(&mut report);
            Ok(CaseOutcome { x: out.x, report, setup })
        }
        Err(SolverError::Budget { mut report, x }) => {
            setup.fill(&mut report);
            Err(SolverError::Budget { report, x })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_laplacian, generate_topology, InteractionMatrix, TopologyKind, DEFAULT_EIGEN_TOL};
    use crate::objectives::{AbsoluteNode, QuadraticNode, ZooSpec};
    use crate::solver::Status;

    fn lap(kind: TopologyKind, m: usize) -> InteractionMatrix {
        build_laplacian(&generate_topology(kind, m, 0).unwrap(), 1, DEFAULT_EIGEN_TOL).unwrap()
    }

    #[test]
    fn case_four_on_three_absolute_values() {
        let w = lap(TopologyKind::Path, 3);
        let f = SeparableObjective::from_nodes(vec![
            AbsoluteNode::new(1.0, vec![-0.5]).unwrap(),
            AbsoluteNode::new(1.0, vec![0.1]).unwrap(),
            AbsoluteNode::new(1.0, vec![0.75]).unwrap(),
        ])
        .unwrap();
        let eps = 1e-2;
        let out = solve_case(&f, &w, &SolverConfig::new(Case::Four, eps)).unwrap();
        let grid_best = (0..=20000)
            .map(|k| -2.0 + k as f64 * 2e-4)
            .map(|v| f.evaluate(&[v, v, v]).unwrap())
            .fold(f64::INFINITY, f64::min);
        let gap = f.evaluate(&out.x).unwrap() - grid_best;
        assert!(gap <= eps, "{gap}");
        assert!(w.quad_form(&out.x).unwrap().sqrt() <= eps / out.setup.r);
    }

    #[test]
    fn case_three_gap_and_shift() {
        let w = lap(TopologyKind::Path, 4);
        let f = ZooSpec::quadratic().build(4, 1, 3).unwrap();
        let eps = 1e-3;
        let out = solve_case(&f, &w, &SolverConfig::new(Case::Three, eps)).unwrap();
        let sol = out.setup.reference.as_ref().unwrap();
        let gap = f.evaluate(&out.x).unwrap() - sol.f_opt;
        assert!(gap <= eps, "{gap}");
        let (mu, _) = out.setup.objective.primal().unwrap();
        let rx = out.setup.r_x.unwrap();
        assert!((mu * rx * rx / 2.0 - eps / 2.0).abs() < 1e-15);
    }

    #[test]
    fn case_requirements_checked() {
        let w = lap(TopologyKind::Path, 2);
        let f = SeparableObjective::from_nodes(vec![
            AbsoluteNode::new(1.0, vec![0.0]).unwrap(),
            AbsoluteNode::new(1.0, vec![1.0]).unwrap(),
        ])
        .unwrap();
        assert!(matches!(
            solve_case(&f, &w, &SolverConfig::new(Case::One, 1e-3)),
            Err(SolverError::MissingConstant { case: Case::One, .. })
        ));
        let q = SeparableObjective::from_nodes(vec![
            QuadraticNode::isotropic(1.0, vec![0.0]).unwrap(),
            QuadraticNode::isotropic(1.0, vec![1.0]).unwrap(),
        ])
        .unwrap();
        assert!(matches!(
            solve_case(&q, &w, &SolverConfig::new(Case::Two, 1e-3)),
            Err(SolverError::MissingConstant { case: Case::Two, .. })
        ));
    }

    #[test]
    fn strict_mode_runs_the_budget() {
        let w = lap(TopologyKind::Path, 5);
        let f = ZooSpec::quadratic().build(5, 1, 0).unwrap();
        let mut cfg = SolverConfig::new(Case::One, 1e-6);
        cfg.mode = Mode::StrictDistributed;
        let out = solve_case(&f, &w, &cfg).unwrap();
        assert_eq!(out.report.status, Status::FixedBudget);
        assert_eq!(out.report.iterations, out.setup.budget);
        assert!(out.report.final_true_gap.unwrap().abs() <= 1e-6);
    }
}
