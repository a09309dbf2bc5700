//! Centralized verification oracle.
//!
//! On the consensus subspace `x = 1 ⊗ v` a separable objective reduces to
//! `sum_i f_i(v)`, and for coordinate-separable nodes every coordinate of `v`
//! is an independent one-dimensional convex problem. The oracle bisects the
//! monotone (sub)gradient sum of each coordinate, which gives the full
//! minimizer interval even when the sum has a flat piece.

use serde::{Deserialize, Serialize};

use crate::graph::InteractionOperator;
use crate::linalg::{norm, sub};
use crate::objectives::{ObjectiveError, RegularizedObjective, SeparableObjective};

const BRACKET_DOUBLINGS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    /// Stacked optimal point `1 ⊗ v`.
    pub x_opt: Vec<f64>,
    /// Optimal value of the objective.
    pub f_opt: f64,
    /// Minimizer interval `[lo, hi]` per coordinate.
    pub intervals: Vec<(f64, f64)>,
}

/// Minimizes `f` over the consensus subspace.
///
/// When the minimizer is not unique, `tie_break` (a stacked point, usually the
/// primal anchor) selects the optimal point closest to it; otherwise the
/// interval midpoint is used.
pub fn consensus_optimum(
    f: &RegularizedObjective,
    tie_break: Option<&[f64]>,
) -> Result<ReferenceSolution, ObjectiveError> {
    if !f.base().is_coordinate_separable() {
        return Err(ObjectiveError::Unsupported("reference oracle needs coordinate-separable nodes".into()));
    }
    let (m, n) = (f.num_nodes(), f.block_dim());
    if let Some(t) = tie_break {
        if t.len() != m * n {
            return Err(ObjectiveError::Shape { expected: m * n, got: t.len() });
        }
    }
    let slope = |c: usize, v: f64| -> Result<f64, ObjectiveError> {
        let g = f.gradient(&vec![v; m * n])?;
        Ok((0..m).map(|i| g[i * n + c]).sum())
    };

    let mut v_opt = Vec::with_capacity(n);
    let mut intervals = Vec::with_capacity(n);
    for c in 0..n {
        let lo = lower_end(|v| slope(c, v))?;
        let hi = upper_end(|v| slope(c, v))?.max(lo);
        let v = match tie_break {
            Some(t) => {
                let mean = (0..m).map(|i| t[i * n + c]).sum::<f64>() / m as f64;
                mean.clamp(lo, hi)
            }
            None => 0.5 * (lo + hi),
        };
        v_opt.push(v);
        intervals.push((lo, hi));
    }
    let x_opt: Vec<f64> = (0..m).flat_map(|_| v_opt.iter().cloned()).collect();
    let f_opt = f.evaluate(&x_opt)?;
    Ok(ReferenceSolution { x_opt, f_opt, intervals })
}

/// [`consensus_optimum`] for an unregularized objective.
pub fn separable_optimum(
    f: &SeparableObjective,
    tie_break: Option<&[f64]>,
) -> Result<ReferenceSolution, ObjectiveError> {
    consensus_optimum(&RegularizedObjective::plain(f.clone()), tie_break)
}

fn bracket<F>(mut s: F, start: f64, want: impl Fn(f64) -> bool) -> Result<f64, ObjectiveError>
where
    F: FnMut(f64) -> Result<f64, ObjectiveError>,
{
    let mut v = start;
    for _ in 0..BRACKET_DOUBLINGS {
        if want(s(v)?) {
            return Ok(v);
        }
        v *= 2.0;
    }
    Err(ObjectiveError::Unsupported("objective has no finite minimizer on the consensus line".into()))
}

/// `sup { v : s(v) < 0 }`.
fn lower_end<F>(mut s: F) -> Result<f64, ObjectiveError>
where
    F: FnMut(f64) -> Result<f64, ObjectiveError>,
{
    let mut lo = bracket(&mut s, -1.0, |g| g < 0.0)?;
    let mut hi = bracket(&mut s, 1.0, |g| g >= 0.0)?;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(hi);
        }
        if s(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// `inf { v : s(v) > 0 }`.
fn upper_end<F>(mut s: F) -> Result<f64, ObjectiveError>
where
    F: FnMut(f64) -> Result<f64, ObjectiveError>,
{
    let mut lo = bracket(&mut s, -1.0, |g| g <= 0.0)?;
    let mut hi = bracket(&mut s, 1.0, |g| g > 0.0)?;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(lo);
        }
        if s(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// `R_x = ||x_opt - anchor||`.
pub fn primal_radius(sol: &ReferenceSolution, anchor: &[f64]) -> f64 {
    norm(&sub(&sol.x_opt, anchor))
}

/// Gradient at the optimum with the consensus component removed, so that it
/// lies in the range of `W`.
fn centered_gradient(f: &RegularizedObjective, x_opt: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
    let (m, n) = (f.num_nodes(), f.block_dim());
    let mut g = f.gradient(x_opt)?;
    for c in 0..n {
        let mean = (0..m).map(|i| g[i * n + c]).sum::<f64>() / m as f64;
        for i in 0..m {
            g[i * n + c] -= mean;
        }
    }
    Ok(g)
}

/// Minimum-norm multiplier `y*` with `grad F(x*) + sqrt(W) y* = 0`.
/// Only meaningful for smooth objectives.
pub fn min_norm_multiplier(
    f: &RegularizedObjective,
    op: &dyn InteractionOperator,
    x_opt: &[f64],
) -> Result<Vec<f64>, ObjectiveError> {
    let g = centered_gradient(f, x_opt)?;
    Ok(op.sqrt_pinv_apply(&g)?.into_iter().map(|v| -v).collect())
}

/// `R = ||y*|| = sqrt(g^T W^+ g)` with `g = grad F(x*)`.
pub fn exact_dual_radius(
    f: &RegularizedObjective,
    op: &dyn InteractionOperator,
    x_opt: &[f64],
) -> Result<f64, ObjectiveError> {
    let g = centered_gradient(f, x_opt)?;
    Ok(op.pinv_quad_form(&g)?.sqrt())
}
