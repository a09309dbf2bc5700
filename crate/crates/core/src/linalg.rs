//! Small dense-vector helpers on plain slices.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Fast-gradient extrapolation `next + beta * (next - prev)`, elementwise.
///
/// Shared by the centralized solver and the per-agent simulator so that both
/// perform bit-identical floating point operations.
pub(crate) fn extrapolate(next: &[f64], prev: &[f64], beta: f64) -> Vec<f64> {
    next.iter().zip(prev).map(|(n, p)| n + beta * (n - p)).collect()
}

/// Momentum coefficient of the constant-step fast gradient method.
pub(crate) fn momentum(l: f64, mu: f64) -> f64 {
    let (sl, sm) = (l.sqrt(), mu.sqrt());
    (sl - sm) / (sl + sm)
}
