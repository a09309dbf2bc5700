//! Built-in node objectives. All of them are sums of scalar functions of the
//! coordinates, so the conjugate maximizer is computed coordinate by
//! coordinate.

use super::{Constants, NodeObjective, ObjectiveError, Proximal};

fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn check(cond: bool, msg: &str) -> Result<(), ObjectiveError> {
    if cond {
        Ok(())
    } else {
        Err(ObjectiveError::InvalidParameter(msg.to_string()))
    }
}

fn check_prox(prox: &Option<Proximal<'_>>, n: usize) -> Result<(), ObjectiveError> {
    if let Some(p) = prox {
        if p.anchor.len() != n {
            return Err(ObjectiveError::Shape { expected: n, got: p.anchor.len() });
        }
        if !(p.weight > 0.0) {
            return Err(ObjectiveError::NonPositiveWeight(p.weight));
        }
    }
    Ok(())
}

/// Merges `(a/2)(v - c)^2` with the proximal term of coordinate `k` into a
/// single `(a'/2)(v - c')^2`.
fn merge(a: f64, c: f64, prox: &Option<Proximal<'_>>, k: usize) -> (f64, f64) {
    match prox {
        Some(p) => {
            let at = a + p.weight;
            (at, (a * c + p.weight * p.anchor[k]) / at)
        }
        None => (a, c),
    }
}

/// `argmax_v u v - (a/2)(v - c)^2 - w |v - b|`.
fn abs_kernel(u: f64, a: f64, c: f64, w: f64, b: f64) -> Option<f64> {
    if a > 0.0 {
        let hi = c + (u - w) / a;
        let lo = c + (u + w) / a;
        Some(if hi > b {
            hi
        } else if lo < b {
            lo
        } else {
            b
        })
    } else if u.abs() < w {
        Some(b)
    } else {
        None
    }
}

/// `argmax_v u v - (a/2)(v - c)^2 - huber_delta(v - b)`.
fn huber_kernel(u: f64, a: f64, c: f64, delta: f64, b: f64) -> Option<f64> {
    if a > 0.0 {
        let hi = c + (u - 1.0) / a;
        let lo = c + (u + 1.0) / a;
        Some(if hi - b > delta {
            hi
        } else if lo - b < -delta {
            lo
        } else {
            (u + a * c + b / delta) / (a + 1.0 / delta)
        })
    } else if u.abs() < 1.0 {
        Some(b + delta * u)
    } else {
        None
    }
}

fn huber(t: f64, delta: f64) -> f64 {
    if t.abs() <= delta {
        t * t / (2.0 * delta)
    } else {
        t.abs() - delta / 2.0
    }
}

fn per_coord<F>(u: &[f64], n: usize, mut kernel: F) -> Result<Vec<f64>, ObjectiveError>
where
    F: FnMut(usize, f64) -> Option<f64>,
{
    if u.len() != n {
        return Err(ObjectiveError::Shape { expected: n, got: u.len() });
    }
    u.iter().enumerate().map(|(k, &uk)| kernel(k, uk).ok_or(ObjectiveError::IllPosed { node: 0 })).collect()
}

/// `f(v) = sum_k (a_k / 2)(v_k - b_k)^2` with `a_k > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticNode {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl QuadraticNode {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self, ObjectiveError> {
        check(a.len() == b.len() && !a.is_empty(), "curvature and center must have equal nonzero length")?;
        check(a.iter().all(|&x| x > 0.0 && x.is_finite()), "curvature must be positive and finite")?;
        Ok(QuadraticNode { a, b })
    }

    /// `(a/2) ||v - b||^2`.
    pub fn isotropic(a: f64, b: Vec<f64>) -> Result<Self, ObjectiveError> {
        Self::new(vec![a; b.len()], b)
    }

    pub fn curvature(&self) -> &[f64] {
        &self.a
    }

    pub fn center(&self) -> &[f64] {
        &self.b
    }
}

impl NodeObjective for QuadraticNode {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn value(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.a).zip(&self.b).map(|((x, a), b)| 0.5 * a * (x - b) * (x - b)).sum()
    }

    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.a).zip(&self.b).map(|((x, a), b)| a * (x - b)).collect()
    }

    fn constants(&self) -> Constants {
        Constants {
            mu: self.a.iter().cloned().fold(f64::INFINITY, f64::min),
            l: self.a.iter().cloned().fold(0.0, f64::max),
            m_lip: f64::INFINITY,
        }
    }

    fn is_dual_friendly(&self) -> bool {
        true
    }

    fn is_coordinate_separable(&self) -> bool {
        true
    }

    fn conjugate_argmax(&self, u: &[f64], prox: Option<Proximal<'_>>) -> Result<Vec<f64>, ObjectiveError> {
        check_prox(&prox, self.dim())?;
        per_coord(u, self.dim(), |k, uk| {
            let (a, c) = merge(self.a[k], self.b[k], &prox, k);
            Some(c + uk / a)
        })
    }
}

/// `f(v) = w ||v - b||_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsoluteNode {
    w: f64,
    b: Vec<f64>,
}

impl AbsoluteNode {
    pub fn new(w: f64, b: Vec<f64>) -> Result<Self, ObjectiveError> {
        check(!b.is_empty(), "center must be nonempty")?;
        check(w > 0.0 && w.is_finite(), "weight must be positive and finite")?;
        Ok(AbsoluteNode { w, b })
    }

    pub fn center(&self) -> &[f64] {
        &self.b
    }
}

impl NodeObjective for AbsoluteNode {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, v: &[f64]) -> f64 {
        self.w * v.iter().zip(&self.b).map(|(x, b)| (x - b).abs()).sum::<f64>()
    }

    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.b).map(|(x, b)| self.w * sign(x - b)).collect()
    }

    fn constants(&self) -> Constants {
        Constants { mu: 0.0, l: f64::INFINITY, m_lip: self.w * (self.dim() as f64).sqrt() }
    }

    fn is_dual_friendly(&self) -> bool {
        true
    }

    fn is_coordinate_separable(&self) -> bool {
        true
    }

    fn conjugate_argmax(&self, u: &[f64], prox: Option<Proximal<'_>>) -> Result<Vec<f64>, ObjectiveError> {
        check_prox(&prox, self.dim())?;
        per_coord(u, self.dim(), |k, uk| {
            let (a, c) = merge(0.0, 0.0, &prox, k);
            abs_kernel(uk, a, c, self.w, self.b[k])
        })
    }
}

/// `f(v) = sum_k huber_delta(v_k - b_k)`, quadratic for `|t| <= delta` and
/// `|t| - delta/2` outside.
#[derive(Debug, Clone, PartialEq)]
pub struct HuberNode {
    delta: f64,
    b: Vec<f64>,
}

impl HuberNode {
    pub fn new(delta: f64, b: Vec<f64>) -> Result<Self, ObjectiveError> {
        check(!b.is_empty(), "center must be nonempty")?;
        check(delta > 0.0 && delta.is_finite(), "delta must be positive and finite")?;
        Ok(HuberNode { delta, b })
    }
}

impl NodeObjective for HuberNode {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.b).map(|(x, b)| huber(x - b, self.delta)).sum()
    }

    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.b).map(|(x, b)| ((x - b) / self.delta).clamp(-1.0, 1.0)).collect()
    }

    fn constants(&self) -> Constants {
        Constants { mu: 0.0, l: 1.0 / self.delta, m_lip: (self.dim() as f64).sqrt() }
    }

    fn is_dual_friendly(&self) -> bool {
        true
    }

    fn is_coordinate_separable(&self) -> bool {
        true
    }

    fn conjugate_argmax(&self, u: &[f64], prox: Option<Proximal<'_>>) -> Result<Vec<f64>, ObjectiveError> {
        check_prox(&prox, self.dim())?;
        per_coord(u, self.dim(), |k, uk| {
            let (a, c) = merge(0.0, 0.0, &prox, k);
            huber_kernel(uk, a, c, self.delta, self.b[k])
        })
    }
}

/// `f(v) = sum_k (a/2)(v_k - c_k)^2 + w |v_k - b_k|`.
///
/// Strongly convex and nonsmooth. The quadratic part is only Lipschitz on a
/// bounded set, so the declared `m_lip` assumes `|v_k - c_k| <= span`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticAbsNode {
    a: f64,
    c: Vec<f64>,
    w: f64,
    b: Vec<f64>,
    span: f64,
}

impl QuadraticAbsNode {
    pub fn new(a: f64, c: Vec<f64>, w: f64, b: Vec<f64>, span: f64) -> Result<Self, ObjectiveError> {
        check(!c.is_empty() && c.len() == b.len(), "centers must have equal nonzero length")?;
        check(a > 0.0 && a.is_finite(), "curvature must be positive and finite")?;
        check(w > 0.0 && w.is_finite(), "weight must be positive and finite")?;
        check(span > 0.0 && span.is_finite(), "span must be positive and finite")?;
        Ok(QuadraticAbsNode { a, c, w, b, span })
    }
}

impl NodeObjective for QuadraticAbsNode {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn value(&self, v: &[f64]) -> f64 {
        (0..self.dim()).map(|k| 0.5 * self.a * (v[k] - self.c[k]).powi(2) + self.w * (v[k] - self.b[k]).abs()).sum()
    }

    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|k| self.a * (v[k] - self.c[k]) + self.w * sign(v[k] - self.b[k])).collect()
    }

    fn constants(&self) -> Constants {
        Constants { mu: self.a, l: f64::INFINITY, m_lip: (self.dim() as f64).sqrt() * (self.a * self.span + self.w) }
    }

    fn is_dual_friendly(&self) -> bool {
        true
    }

    fn is_coordinate_separable(&self) -> bool {
        true
    }

    fn conjugate_argmax(&self, u: &[f64], prox: Option<Proximal<'_>>) -> Result<Vec<f64>, ObjectiveError> {
        check_prox(&prox, self.dim())?;
        per_coord(u, self.dim(), |k, uk| {
            let (a, c) = merge(self.a, self.c[k], &prox, k);
            abs_kernel(uk, a, c, self.w, self.b[k])
        })
    }
}

/// `f(v) = sum_k log(1 + exp(v_k - b_k)) + (a/2) v_k^2`.
///
/// Smooth and strongly convex but without a closed-form conjugate; it needs
/// the inexact inner solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftplusNode {
    a: f64,
    b: Vec<f64>,
}

impl SoftplusNode {
    pub fn new(a: f64, b: Vec<f64>) -> Result<Self, ObjectiveError> {
        check(!b.is_empty(), "center must be nonempty")?;
        check(a > 0.0 && a.is_finite(), "curvature must be positive and finite")?;
        Ok(SoftplusNode { a, b })
    }
}

fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl NodeObjective for SoftplusNode {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.b).map(|(x, b)| softplus(x - b) + 0.5 * self.a * x * x).sum()
    }

    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.b).map(|(x, b)| logistic(x - b) + self.a * x).collect()
    }

    fn constants(&self) -> Constants {
        Constants { mu: self.a, l: self.a + 0.25, m_lip: f64::INFINITY }
    }

    fn is_coordinate_separable(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Golden-section maximization of a concave scalar function, independent
    /// of the closed-form kernels.
    fn argmax_1d<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..300 {
            let x1 = hi - g * (hi - lo);
            let x2 = lo + g * (hi - lo);
            if f(x1) < f(x2) {
                lo = x1;
            } else {
                hi = x2;
            }
        }
        0.5 * (lo + hi)
    }

    fn check_against_search(node: &dyn NodeObjective, u: f64, prox: Option<(f64, f64)>) {
        let anchor = prox.map(|p| vec![p.1]);
        let p = prox.map(|(w, _)| Proximal { weight: w, anchor: anchor.as_deref().unwrap() });
        let got = node.conjugate_argmax(&[u], p).unwrap()[0];
        let obj = |v: f64| {
            let reg = prox.map_or(0.0, |(w, c)| 0.5 * w * (v - c) * (v - c));
            u * v - node.value(&[v]) - reg
        };
        let want = argmax_1d(obj, -50.0, 50.0);
        assert!((got - want).abs() < 1e-6, "u={u} prox={prox:?}: {got} vs {want}");
    }

    #[test]
    fn quadratic_examples() {
        let q = QuadraticNode::isotropic(1.0, vec![0.0, 2.0]).unwrap();
        assert_eq!(q.conjugate_argmax(&[1.0, -1.0], None).unwrap(), vec![1.0, 1.0]);
        let q = QuadraticNode::isotropic(4.0, vec![0.0]).unwrap();
        assert_eq!(q.conjugate_argmax(&[2.0], None).unwrap(), vec![0.5]);
        assert_eq!(q.conjugate_argmax(&[0.0], None).unwrap(), vec![0.0]);
    }

    #[test]
    fn kernels_match_golden_section() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let nodes: Vec<Box<dyn NodeObjective>> = vec![
            Box::new(QuadraticNode::isotropic(1.7, vec![0.4]).unwrap()),
            Box::new(AbsoluteNode::new(0.8, vec![-0.3]).unwrap()),
            Box::new(HuberNode::new(0.5, vec![0.2]).unwrap()),
            Box::new(QuadraticAbsNode::new(1.2, vec![0.5], 0.7, vec![-0.1], 2.0).unwrap()),
        ];
        for node in &nodes {
            for _ in 0..30 {
                let u = rng.random_range(-3.0..3.0);
                let w = rng.random_range(0.05..2.0);
                let c = rng.random_range(-1.0..1.0);
                check_against_search(node.as_ref(), u, Some((w, c)));
                if node.constants().mu > 0.0 {
                    check_against_search(node.as_ref(), u, None);
                }
            }
        }
    }

    #[test]
    fn ill_posed_without_curvature() {
        let a = AbsoluteNode::new(1.0, vec![0.0]).unwrap();
        assert_eq!(a.conjugate_argmax(&[0.5], None).unwrap(), vec![0.0]);
        assert_eq!(a.conjugate_argmax(&[1.0], None), Err(ObjectiveError::IllPosed { node: 0 }));
        let h = HuberNode::new(0.5, vec![1.0]).unwrap();
        assert_eq!(h.conjugate_argmax(&[0.5], None).unwrap(), vec![1.25]);
        assert!(h.conjugate_argmax(&[-2.0], None).is_err());
    }

    #[test]
    fn softplus_has_no_closed_form() {
        let s = SoftplusNode::new(1.0, vec![0.0]).unwrap();
        assert!(!s.is_dual_friendly());
        assert!(s.conjugate_argmax(&[0.0], None).is_err());
        assert_relative_eq!(s.value(&[0.0]), 2f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(s.gradient(&[0.0])[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn declared_constants_hold_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let nodes: Vec<Box<dyn NodeObjective>> = vec![
            Box::new(QuadraticNode::new(vec![0.5, 3.0], vec![1.0, -1.0]).unwrap()),
            Box::new(HuberNode::new(0.3, vec![0.0, 0.5]).unwrap()),
            Box::new(SoftplusNode::new(0.2, vec![0.1, -0.4]).unwrap()),
            Box::new(QuadraticAbsNode::new(0.9, vec![0.0, 0.0], 1.0, vec![0.3, -0.2], 2.0).unwrap()),
        ];
        for node in &nodes {
            let k = node.constants();
            for _ in 0..200 {
                let v: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
                let w: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
                let gv = node.gradient(&v);
                let d2: f64 = v.iter().zip(&w).map(|(a, b)| (a - b) * (a - b)).sum();
                let lin: f64 = gv.iter().zip(w.iter().zip(&v)).map(|(g, (a, b))| g * (a - b)).sum();
                assert!(node.value(&w) >= node.value(&v) + lin + 0.5 * k.mu * d2 - 1e-12);
                if k.l.is_finite() {
                    let gw = node.gradient(&w);
                    let dg: f64 = gv.iter().zip(&gw).map(|(a, b)| (a - b) * (a - b)).sum();
                    assert!(dg.sqrt() <= k.l * d2.sqrt() + 1e-12);
                }
            }
        }
    }
}
