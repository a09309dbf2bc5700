use super::SolverError;
use crate::linalg::{all_finite, extrapolate, momentum, norm};

/// When [`fgm`] stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgmStop {
    pub max_iters: usize,
    /// Stop as soon as `||grad f(y_k)|| <= grad_tol`; `0` disables the test.
    pub grad_tol: f64,
    pub record_iterates: bool,
}

impl FgmStop {
    pub fn iterations(n: usize) -> Self {
        FgmStop { max_iters: n, grad_tol: 0.0, record_iterates: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FgmOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub grad_calls: usize,
    pub converged: bool,
    /// `x_0, x_1, ..., x_N` when requested.
    pub iterates: Vec<Vec<f64>>,
}

/// Constant-step fast gradient method.
///
/// ```text
/// x_{k+1} = y_k - grad f(y_k) / L
/// y_{k+1} = x_{k+1} + beta_k (x_{k+1} - x_k)
/// ```
///
/// with `beta = (sqrt L - sqrt mu) / (sqrt L + sqrt mu)` for `mu > 0` and
/// `beta_k = k / (k + 3)` for `mu = 0`. With `grad_tol > 0` the method returns
/// the first extrapolated point whose gradient is small enough.
pub fn fgm<G>(mut grad: G, x0: &[f64], l: f64, mu: f64, stop: FgmStop) -> Result<FgmOutcome, SolverError>
where
    G: FnMut(&[f64]) -> Result<Vec<f64>, SolverError>,
{
    if !(l > 0.0) || !l.is_finite() || !(mu >= 0.0) || mu > l {
        return Err(SolverError::InvalidConfig(format!("need L >= mu >= 0 and L > 0, got L={l}, mu={mu}")));
    }
    let mut x = x0.to_vec();
    let mut y = x0.to_vec();
    let mut grad_calls = 0;
    let mut iterates = Vec::new();
    if stop.record_iterates {
        iterates.push(x.clone());
    }
    for k in 0..stop.max_iters {
        let g = grad(&y)?;
        grad_calls += 1;
        if !all_finite(&g) {
            return Err(SolverError::Divergence { iteration: k });
        }
        if stop.grad_tol > 0.0 && norm(&g) <= stop.grad_tol {
            return Ok(FgmOutcome { x: y, iterations: k, grad_calls, converged: true, iterates });
        }
        let next: Vec<f64> = y.iter().zip(&g).map(|(yi, gi)| yi - gi / l).collect();
        let beta = if mu > 0.0 { momentum(l, mu) } else { k as f64 / (k as f64 + 3.0) };
        y = extrapolate(&next, &x, beta);
        x = next;
        if !all_finite(&x) {
            return Err(SolverError::Divergence { iteration: k + 1 });
        }
        if stop.record_iterates {
            iterates.push(x.clone());
        }
    }
    let converged = stop.grad_tol <= 0.0;
    Ok(FgmOutcome { x, iterations: stop.max_iters, grad_calls, converged, iterates })
}
