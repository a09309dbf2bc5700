use super::{fgm, FgmStop, SolverError};
use crate::linalg::norm;
use crate::objectives::{NodeObjective, ObjectiveError, PrimalResponse, Proximal, RegularizedObjective};

const INNER_MAX_ITERS: usize = 1_000_000;

/// Approximates `argmax_v <u, v> - f(v) - prox(v)` with the fast gradient
/// method, starting from zero and stopping at
/// `||grad|| <= delta (1 + ||u||)`. Returns the point and the number of
/// gradient calls.
pub fn inexact_conjugate_solve(
    node: &dyn NodeObjective,
    u: &[f64],
    delta: f64,
    prox: Option<Proximal<'_>>,
) -> Result<(Vec<f64>, usize), SolverError> {
    if u.len() != node.dim() {
        return Err(ObjectiveError::Shape { expected: node.dim(), got: u.len() }.into());
    }
    let c = node.constants();
    let w = prox.map_or(0.0, |p| p.weight);
    let (l, mu) = (c.l + w, c.mu + w);
    if !l.is_finite() {
        return Err(SolverError::Unsupported("inexact conjugate needs a smooth node".into()));
    }
    if !(mu > 0.0) {
        return Err(SolverError::Unsupported(
            "inexact conjugate needs a strongly convex node; add a primal regularizer".into(),
        ));
    }
    let grad = |v: &[f64]| -> Result<Vec<f64>, SolverError> {
        let mut g = node.gradient(v);
        for (k, gk) in g.iter_mut().enumerate() {
            *gk -= u[k];
            if let Some(p) = prox {
                *gk += p.weight * (v[k] - p.anchor[k]);
            }
        }
        Ok(g)
    };
    let stop = FgmStop { max_iters: INNER_MAX_ITERS, grad_tol: delta * (1.0 + norm(u)), record_iterates: false };
    let out = fgm(grad, &vec![0.0; u.len()], l, mu, stop)?;
    if !out.converged {
        return Err(SolverError::Unsupported("inner solve did not reach its tolerance".into()));
    }
    Ok((out.x, out.grad_calls))
}

fn to_objective_error(e: SolverError) -> ObjectiveError {
    match e {
        SolverError::Objective(o) => o,
        other => ObjectiveError::Unsupported(other.to_string()),
    }
}

/// Inexact `x*_i(u_i)` of node `i`, including the primal regularizer if any.
pub(crate) fn inexact_node_argmax(
    f: &RegularizedObjective,
    i: usize,
    u_i: &[f64],
    delta: f64,
) -> Result<PrimalResponse, ObjectiveError> {
    let n = f.block_dim();
    let prox = f.primal().map(|(weight, anchor)| Proximal { weight, anchor: &anchor[i * n..(i + 1) * n] });
    let (x, grad_calls) = inexact_conjugate_solve(f.base().node(i), u_i, delta, prox).map_err(to_objective_error)?;
    Ok(PrimalResponse { x, grad_calls, comm_rounds: 0 })
}

/// Inexact `x*(u)` for the whole network.
///
/// Node by node when the objective is separable. With the condition term the
/// problem couples neighbors and is solved on the stacked vector; each inner
/// gradient then costs one communication round and one gradient call per
/// node.
pub(crate) fn inexact_argmax(
    f: &RegularizedObjective,
    u: &[f64],
    delta: f64,
) -> Result<PrimalResponse, ObjectiveError> {
    f.base().check_len(u)?;
    if f.condition().is_some() {
        let k = f.constants();
        let grad = |x: &[f64]| -> Result<Vec<f64>, SolverError> {
            let mut g = f.gradient(x)?;
            for (gi, ui) in g.iter_mut().zip(u) {
                *gi -= ui;
            }
            Ok(g)
        };
        let stop = FgmStop { max_iters: INNER_MAX_ITERS, grad_tol: delta * (1.0 + norm(u)), record_iterates: false };
        let out = fgm(grad, &vec![0.0; u.len()], k.l, k.mu, stop).map_err(to_objective_error)?;
        if !out.converged {
            return Err(ObjectiveError::Unsupported("inner solve did not reach its tolerance".into()));
        }
        return Ok(PrimalResponse {
            x: out.x,
            grad_calls: out.grad_calls * f.num_nodes(),
            comm_rounds: out.grad_calls,
        });
    }
    let n = f.block_dim();
    let mut resp = PrimalResponse { x: Vec::with_capacity(u.len()), grad_calls: 0, comm_rounds: 0 };
    for i in 0..f.num_nodes() {
        let r = inexact_node_argmax(f, i, &u[i * n..(i + 1) * n], delta)?;
        resp.x.extend(r.x);
        resp.grad_calls += r.grad_calls;
    }
    Ok(resp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{AbsoluteNode, QuadraticNode};

    #[test]
    fn matches_closed_form_quadratic() {
        let q = QuadraticNode::new(vec![0.5, 4.0], vec![1.0, -2.0]).unwrap();
        let u = [0.7, -0.3];
        let exact = q.conjugate_argmax(&u, None).unwrap();
        let (x, calls) = inexact_conjugate_solve(&q, &u, 1e-10, None).unwrap();
        assert!(calls > 0);
        for (a, b) in x.iter().zip(&exact) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn tighter_tolerance_costs_more() {
        let q = QuadraticNode::new(vec![0.1, 10.0], vec![1.0, -2.0]).unwrap();
        let mut prev = 0;
        for delta in [1e-2, 1e-4, 1e-6, 1e-8, 1e-10] {
            let (_, calls) = inexact_conjugate_solve(&q, &[0.3, 0.3], delta, None).unwrap();
            assert!(calls >= prev);
            prev = calls;
        }
    }

    #[test]
    fn nonsmooth_is_unsupported() {
        let a = AbsoluteNode::new(1.0, vec![0.0]).unwrap();
        assert!(matches!(inexact_conjugate_solve(&a, &[0.1], 1e-8, None), Err(SolverError::Unsupported(_))));
    }
}
