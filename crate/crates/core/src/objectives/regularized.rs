use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{Constants, ObjectiveError, SeparableObjective};
use crate::graph::{InteractionMatrix, InteractionOperator};
use crate::linalg::dot;

/// How a [`RegularizedObjective`] modifies its base.
#[derive(Debug, Clone)]
pub enum RegularizationMode {
    /// Adds `(weight/2) ||x - anchor||^2`.
    Primal { weight: f64, anchor: Vec<f64> },
    /// Adds `(weight/2) ||y||^2` to the dual function.
    Dual { weight: f64 },
    /// Adds `(alpha/2) <x, W x>`, which vanishes on the consensus subspace.
    Condition { alpha: f64, laplacian: InteractionMatrix },
}

impl RegularizationMode {
    /// `eps / R_x^2`.
    pub fn primal_weight(eps: f64, r_x: f64) -> f64 {
        eps / (r_x * r_x)
    }

    /// `eps / R^2`.
    pub fn dual_weight(eps: f64, r: f64) -> f64 {
        eps / (r * r)
    }

    /// `sum_i mu_i / lambda_min_pos(W)`.
    pub fn condition_alpha(f: &SeparableObjective, w: &InteractionMatrix) -> f64 {
        let total: f64 = f.nodes().iter().map(|n| n.constants().mu).sum();
        total / w.spectral().lambda_min_pos
    }
}

/// Closed-form constant bounds for the condition mode,
/// `mu >= min(sum mu_i, alpha lambda_min_pos)` and
/// `L <= max L_i + alpha lambda_max`.
///
/// The lower bound is not valid in general (a three-node path with one weak
/// node already violates it), which is why [`RegularizedObjective::constants`]
/// uses the exact extreme eigenvalues instead. Kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionBounds {
    pub mu: f64,
    pub l: f64,
}

/// A separable objective with any combination of primal, dual and
/// condition-number regularization.
#[derive(Debug, Clone)]
pub struct RegularizedObjective {
    base: SeparableObjective,
    primal: Option<(f64, Vec<f64>)>,
    dual: Option<f64>,
    condition: Option<(f64, InteractionMatrix)>,
}

pub fn regularize(f: &SeparableObjective, mode: RegularizationMode) -> Result<RegularizedObjective, ObjectiveError> {
    RegularizedObjective::plain(f.clone()).with(mode)
}

impl From<SeparableObjective> for RegularizedObjective {
    fn from(f: SeparableObjective) -> Self {
        Self::plain(f)
    }
}

impl RegularizedObjective {
    pub fn plain(base: SeparableObjective) -> Self {
        RegularizedObjective { base, primal: None, dual: None, condition: None }
    }

    /// Adds one more regularizer. Each mode may appear at most once.
    pub fn with(mut self, mode: RegularizationMode) -> Result<Self, ObjectiveError> {
        let positive =
            |w: f64| if w > 0.0 && w.is_finite() { Ok(()) } else { Err(ObjectiveError::NonPositiveWeight(w)) };
        match mode {
            RegularizationMode::Primal { weight, anchor } => {
                positive(weight)?;
                self.base.check_len(&anchor)?;
                if self.primal.is_some() {
                    return Err(ObjectiveError::InvalidParameter("primal regularizer already set".into()));
                }
                self.primal = Some((weight, anchor));
            }
            RegularizationMode::Dual { weight } => {
                positive(weight)?;
                if self.dual.is_some() {
                    return Err(ObjectiveError::InvalidParameter("dual regularizer already set".into()));
                }
                self.dual = Some(weight);
            }
            RegularizationMode::Condition { alpha, laplacian } => {
                positive(alpha)?;
                if laplacian.num_nodes() != self.base.num_nodes() {
                    return Err(ObjectiveError::Shape { expected: self.base.num_nodes(), got: laplacian.num_nodes() });
                }
                if self.condition.is_some() {
                    return Err(ObjectiveError::InvalidParameter("condition regularizer already set".into()));
                }
                let laplacian = laplacian.with_block_dim(self.base.block_dim())?;
                self.condition = Some((alpha, laplacian));
            }
        }
        Ok(self)
    }

    pub fn base(&self) -> &SeparableObjective {
        &self.base
    }

    pub fn primal(&self) -> Option<(f64, &[f64])> {
        self.primal.as_ref().map(|(w, a)| (*w, a.as_slice()))
    }

    /// `mu_hat`, zero when no dual regularizer is set.
    pub fn dual_weight(&self) -> f64 {
        self.dual.unwrap_or(0.0)
    }

    pub fn condition(&self) -> Option<(f64, &InteractionMatrix)> {
        self.condition.as_ref().map(|(a, w)| (*a, w))
    }

    pub fn num_nodes(&self) -> usize {
        self.base.num_nodes()
    }

    pub fn block_dim(&self) -> usize {
        self.base.block_dim()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Constants of the regularized primal function.
    ///
    /// In condition mode `mu` and `L` are the extreme eigenvalues of
    /// `diag(mu_i) + alpha W̄` and `diag(L_i) + alpha W̄`.
    pub fn constants(&self) -> Constants {
        let mut k = self.base.constants();
        if let Some((alpha, w)) = &self.condition {
            let mus: Vec<f64> = self.base.nodes().iter().map(|n| n.constants().mu).collect();
            let ls: Vec<f64> = self.base.nodes().iter().map(|n| n.constants().l).collect();
            k.mu = shifted_extreme(&mus, *alpha, w).0;
            k.l = if ls.iter().all(|l| l.is_finite()) { shifted_extreme(&ls, *alpha, w).1 } else { f64::INFINITY };
            k.m_lip = f64::INFINITY;
        }
        if let Some((weight, _)) = &self.primal {
            k.mu += weight;
            k.l += weight;
            k.m_lip = f64::INFINITY;
        }
        k
    }

    /// Closed-form condition-mode bounds; `None` without a condition term.
    pub fn condition_bounds(&self) -> Option<ConditionBounds> {
        let (alpha, w) = self.condition.as_ref()?;
        let base = self.base.constants();
        let sum_mu: f64 = self.base.nodes().iter().map(|n| n.constants().mu).sum();
        let s = w.spectral();
        Some(ConditionBounds { mu: sum_mu.min(alpha * s.lambda_min_pos), l: base.l + alpha * s.lambda_max })
    }

    pub fn is_dual_friendly(&self) -> bool {
        self.condition.is_none() && self.base.is_dual_friendly()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        let mut v = self.base.evaluate(x)?;
        if let Some((weight, anchor)) = &self.primal {
            let d: f64 = x.iter().zip(anchor).map(|(a, b)| (a - b) * (a - b)).sum();
            v += 0.5 * weight * d;
        }
        if let Some((alpha, w)) = &self.condition {
            v += 0.5 * alpha * w.quad_form(x)?;
        }
        Ok(v)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        let mut g = self.base.gradient(x)?;
        if let Some((weight, anchor)) = &self.primal {
            for ((gi, xi), ai) in g.iter_mut().zip(x).zip(anchor) {
                *gi += weight * (xi - ai);
            }
        }
        if let Some((alpha, w)) = &self.condition {
            let wx = w.apply(x)?;
            for (gi, wi) in g.iter_mut().zip(&wx) {
                *gi += alpha * wi;
            }
        }
        Ok(g)
    }

    /// Closed-form `x*(u)`. The condition term couples neighbors, so this
    /// errors in condition mode; the solver then switches to inexact solves.
    pub fn conjugate_argmax(&self, u: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        if self.condition.is_some() {
            return Err(ObjectiveError::Unsupported("condition term has no separable conjugate".into()));
        }
        self.base.conjugate_argmax(u, self.primal())
    }

    pub fn node_conjugate_argmax(&self, i: usize, u_i: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        if self.condition.is_some() {
            return Err(ObjectiveError::Unsupported("condition term has no separable conjugate".into()));
        }
        self.base.node_conjugate_argmax(i, u_i, self.primal())
    }

    /// `<u, x> - F_reg(x)` evaluated at `x`.
    pub(crate) fn envelope(&self, u: &[f64], x: &[f64]) -> Result<f64, ObjectiveError> {
        Ok(dot(u, x) - self.evaluate(x)?)
    }
}

/// Smallest and largest eigenvalue of `diag(d) + alpha W̄`.
fn shifted_extreme(d: &[f64], alpha: f64, w: &InteractionMatrix) -> (f64, f64) {
    let mut mat: DMatrix<f64> = w.laplacian() * alpha;
    for (i, di) in d.iter().enumerate() {
        mat[(i, i)] += di;
    }
    let eig = SymmetricEigen::new(mat);
    let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}
