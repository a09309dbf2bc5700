use serde::{Deserialize, Serialize};

use super::{ObjectiveError, RegularizedObjective};
use crate::graph::{InteractionOperator, SpectralData};
use crate::linalg::{dot, norm};

/// Which matrix plays `A` in the constraint `A x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `A = sqrt(W)`, so `A^T A = W`.
    #[default]
    SqrtLaplacian,
    /// `A = W`, so `A^T A = W^2`.
    Laplacian,
}

impl Constraint {
    /// Spectral data of `A^T A` given that of `W`.
    pub fn gram_spectral(&self, w: &SpectralData) -> SpectralData {
        match self {
            Constraint::SqrtLaplacian => *w,
            Constraint::Laplacian => SpectralData {
                lambda_max: w.lambda_max * w.lambda_max,
                lambda_min_pos: w.lambda_min_pos * w.lambda_min_pos,
                chi: w.chi * w.chi,
                eigen_tol: w.eigen_tol,
            },
        }
    }

    pub fn apply(&self, op: &dyn InteractionOperator, x: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        Ok(match self {
            Constraint::SqrtLaplacian => op.apply_sqrt(x)?,
            Constraint::Laplacian => op.apply(x)?,
        })
    }
}

/// How `x*(u)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConjugateOracle {
    /// Closed-form per-node maximizer.
    #[default]
    Explicit,
    /// Fast gradient method on `F(x) - <u, x>`, stopped at
    /// `||grad|| <= delta (1 + ||u||)`.
    Inexact { delta: f64 },
}

/// `x*(u)` together with the oracle work it took.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalResponse {
    pub x: Vec<f64>,
    pub grad_calls: usize,
    pub comm_rounds: usize,
}

/// `phi(y) = max_x <A^T y, x> - F(x) + (mu_hat/2)||y||^2`.
///
/// `mu_phi = lambda_min_pos(A^T A) / L + mu_hat` and
/// `L_phi = lambda_max(A^T A) / mu + mu_hat`; both follow the eigenvalue
/// convention described at the crate root.
#[derive(Clone, Copy)]
pub struct DualFunction<'a> {
    objective: &'a RegularizedObjective,
    op: &'a dyn InteractionOperator,
    constraint: Constraint,
    oracle: ConjugateOracle,
}

impl<'a> DualFunction<'a> {
    pub fn new(objective: &'a RegularizedObjective, op: &'a dyn InteractionOperator) -> Result<Self, ObjectiveError> {
        if op.num_nodes() != objective.num_nodes() || op.block_dim() != objective.block_dim() {
            return Err(ObjectiveError::Shape { expected: objective.dim(), got: op.dim() });
        }
        Ok(DualFunction { objective, op, constraint: Constraint::SqrtLaplacian, oracle: ConjugateOracle::Explicit })
    }

    pub fn with_constraint(mut self, constraint: Constraint) -> Self {
        self.constraint = constraint;
        self
    }

    pub fn with_oracle(mut self, oracle: ConjugateOracle) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn objective(&self) -> &'a RegularizedObjective {
        self.objective
    }

    pub fn operator(&self) -> &'a dyn InteractionOperator {
        self.op
    }

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    pub fn oracle(&self) -> ConjugateOracle {
        self.oracle
    }

    pub fn mu_hat(&self) -> f64 {
        self.objective.dual_weight()
    }

    pub fn gram_spectral(&self) -> SpectralData {
        self.constraint.gram_spectral(self.op.spectral())
    }

    pub fn mu_phi(&self) -> f64 {
        let l = self.objective.constants().l;
        let base = if l.is_finite() { self.gram_spectral().lambda_min_pos / l } else { 0.0 };
        base + self.mu_hat()
    }

    pub fn l_phi(&self) -> f64 {
        let mu = self.objective.constants().mu;
        if mu > 0.0 {
            self.gram_spectral().lambda_max / mu + self.mu_hat()
        } else {
            f64::INFINITY
        }
    }

    /// `x*(u) = argmax_x <u, x> - F(x)`.
    pub fn primal_response(&self, u: &[f64]) -> Result<PrimalResponse, ObjectiveError> {
        match self.oracle {
            ConjugateOracle::Explicit => {
                Ok(PrimalResponse { x: self.objective.conjugate_argmax(u)?, grad_calls: 0, comm_rounds: 0 })
            }
            ConjugateOracle::Inexact { delta } => crate::solver::inexact_argmax(self.objective, u, delta),
        }
    }

    pub fn apply_a(&self, x: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        self.constraint.apply(self.op, x)
    }

    /// `A` is symmetric for both constraint choices.
    pub fn apply_at(&self, y: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        self.constraint.apply(self.op, y)
    }

    pub fn value(&self, y: &[f64]) -> Result<f64, ObjectiveError> {
        let u = self.apply_at(y)?;
        let x = self.primal_response(&u)?.x;
        let r = norm(y);
        Ok(self.objective.envelope(&u, &x)? + 0.5 * self.mu_hat() * r * r)
    }

    /// Danskin gradient `A x*(A^T y) + mu_hat y`.
    pub fn gradient(&self, y: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        let u = self.apply_at(y)?;
        let x = self.primal_response(&u)?.x;
        let mut g = self.apply_a(&x)?;
        let mh = self.mu_hat();
        if mh != 0.0 {
            for (gi, yi) in g.iter_mut().zip(y) {
                *gi += mh * yi;
            }
        }
        Ok(g)
    }

    /// Feasibility `||A x||`.
    pub fn residual(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        Ok(match self.constraint {
            // the quadratic form loses half the digits near consensus
            Constraint::SqrtLaplacian => norm(&self.op.apply_sqrt(x)?),
            Constraint::Laplacian => norm(&self.op.apply(x)?),
        })
    }
}

/// A-priori bound `R <= M / sqrt(lambda_min_pos(A^T A))` on the norm of the
/// minimum-norm dual solution.
pub fn bound_dual_radius(m_lip: f64, gram: &SpectralData) -> Result<f64, ObjectiveError> {
    if !(gram.lambda_min_pos > 0.0) || !gram.lambda_min_pos.is_finite() {
        return Err(ObjectiveError::ZeroSpectralGap);
    }
    if !m_lip.is_finite() || m_lip < 0.0 {
        return Err(ObjectiveError::MissingConstant("M"));
    }
    Ok(m_lip / gram.lambda_min_pos.sqrt())
}

/// Quadratic penalty `G(Ax) = (R^2 / 2 eps) ||A x||^2`, whose gradient is
/// `lambda_max(A^T A) R^2 / eps`-Lipschitz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedPenalty {
    r: f64,
    eps: f64,
    constraint: Constraint,
}

impl SmoothedPenalty {
    pub fn new(r: f64, eps: f64, constraint: Constraint) -> Result<Self, ObjectiveError> {
        for v in [r, eps] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ObjectiveError::NonPositiveWeight(v));
            }
        }
        Ok(SmoothedPenalty { r, eps, constraint })
    }

    fn coef(&self) -> f64 {
        self.r * self.r / self.eps
    }

    pub fn value(&self, op: &dyn InteractionOperator, x: &[f64]) -> Result<f64, ObjectiveError> {
        let ax = self.constraint.apply(op, x)?;
        Ok(0.5 * self.coef() * dot(&ax, &ax))
    }

    /// `(R^2/eps) A^T A x`.
    pub fn gradient(&self, op: &dyn InteractionOperator, x: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        let ata_x = match self.constraint {
            Constraint::SqrtLaplacian => op.apply(x)?,
            Constraint::Laplacian => op.apply(&op.apply(x)?)?,
        };
        Ok(ata_x.into_iter().map(|v| self.coef() * v).collect())
    }

    pub fn lipschitz(&self, op: &dyn InteractionOperator) -> f64 {
        self.constraint.gram_spectral(op.spectral()).lambda_max * self.coef()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_laplacian, generate_topology, InteractionMatrix, TopologyKind, DEFAULT_EIGEN_TOL};
    use crate::objectives::{QuadraticNode, SeparableObjective};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k2() -> InteractionMatrix {
        build_laplacian(&generate_topology(TopologyKind::Path, 2, 0).unwrap(), 1, DEFAULT_EIGEN_TOL).unwrap()
    }

    fn quad(b: &[f64]) -> RegularizedObjective {
        SeparableObjective::from_nodes(b.iter().map(|&bi| QuadraticNode::isotropic(1.0, vec![bi]).unwrap()).collect())
            .unwrap()
            .into()
    }

    #[test]
    fn gradient_at_zero_on_k2() {
        let w = k2();
        let f = quad(&[0.0, 2.0]);
        let d = DualFunction::new(&f, &w).unwrap().with_constraint(Constraint::Laplacian);
        // phi(y) = <W y, b> + ||W y||^2 / 2, gradient W b + W^2 y
        let g = d.gradient(&[0.0, 0.0]).unwrap();
        assert_eq!(g, vec![-2.0, 2.0]);
        let y = [0.3, -0.1];
        let wy = [0.4, -0.4];
        let by_hand = [wy[0] - wy[1] + (0.0 - 2.0), wy[1] - wy[0] + (2.0 - 0.0)];
        let g = d.gradient(&y).unwrap();
        assert_relative_eq!(g[0], by_hand[0], epsilon = 1e-14);
        assert_relative_eq!(g[1], by_hand[1], epsilon = 1e-14);
    }

    #[test]
    fn consensual_center_has_zero_gradient() {
        let w = k2();
        let f = quad(&[1.5, 1.5]);
        let d = DualFunction::new(&f, &w).unwrap();
        let g = d.gradient(&[0.7, 0.7]).unwrap();
        assert!(norm(&g) < 1e-12);
    }

    #[test]
    fn dual_constants() {
        let w = build_laplacian(&generate_topology(TopologyKind::Path, 3, 0).unwrap(), 1, DEFAULT_EIGEN_TOL).unwrap();
        let f: RegularizedObjective = SeparableObjective::from_nodes(vec![
            QuadraticNode::isotropic(2.0, vec![0.0]).unwrap(),
            QuadraticNode::isotropic(4.0, vec![0.0]).unwrap(),
            QuadraticNode::isotropic(2.0, vec![0.0]).unwrap(),
        ])
        .unwrap()
        .into();
        let d = DualFunction::new(&f, &w).unwrap();
        assert_relative_eq!(d.mu_phi(), 1.0 / 4.0, epsilon = 1e-12);
        assert_relative_eq!(d.l_phi(), 3.0 / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn radius_bound_examples() {
        let s = SpectralData { lambda_max: 1.0, lambda_min_pos: 0.5, chi: 2.0, eigen_tol: 1e-9 };
        assert_relative_eq!(bound_dual_radius(1.0, &s).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(bound_dual_radius(0.0, &s).unwrap(), 0.0);
        let z = SpectralData { lambda_min_pos: 0.0, ..s };
        assert_eq!(bound_dual_radius(1.0, &z), Err(ObjectiveError::ZeroSpectralGap));
    }

    #[test]
    fn penalty_examples() {
        let w = k2();
        let p = SmoothedPenalty::new(1.0, 0.5, Constraint::Laplacian).unwrap();
        assert_relative_eq!(p.value(&w, &[0.0, 2.0]).unwrap(), 8.0, epsilon = 1e-14);
        assert_eq!(p.value(&w, &[3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(p.gradient(&w, &[3.0, 3.0]).unwrap(), vec![0.0, 0.0]);
        assert!(SmoothedPenalty::new(0.0, 1.0, Constraint::Laplacian).is_err());
    }

    #[test]
    fn penalty_lipschitz_audit() {
        let w = build_laplacian(&generate_topology(TopologyKind::Cycle, 7, 0).unwrap(), 2, DEFAULT_EIGEN_TOL).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for constraint in [Constraint::SqrtLaplacian, Constraint::Laplacian] {
            let p = SmoothedPenalty::new(1.3, 0.1, constraint).unwrap();
            let lip = p.lipschitz(&w);
            let mut worst: f64 = 0.0;
            for _ in 0..100 {
                let x: Vec<f64> = (0..14).map(|_| rng.random_range(-1.0..1.0)).collect();
                let z: Vec<f64> = (0..14).map(|_| rng.random_range(-1.0..1.0)).collect();
                let gx = p.gradient(&w, &x).unwrap();
                let gz = p.gradient(&w, &z).unwrap();
                let ratio = norm(&crate::linalg::sub(&gx, &gz)) / norm(&crate::linalg::sub(&x, &z));
                worst = worst.max(ratio);
            }
            assert!(worst <= lip * (1.0 + 1e-12), "{worst} > {lip}");
        }
    }
}
