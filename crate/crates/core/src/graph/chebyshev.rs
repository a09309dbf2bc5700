use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::interaction::{psd_sqrt, InteractionMatrix, InteractionOperator, SpectralData};
use super::{Graph, TopologyError};

/// Degree of the Chebyshev polynomial. `Auto` picks `ceil(sqrt(chi))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChebyshevDegree {
    #[default]
    Auto,
    Fixed(usize),
}

/// Shifted and scaled Chebyshev polynomial
///
/// `P_K(x) = 1 - T_K((b + a - 2x) / (b - a)) / T_K((b + a) / (b - a))`
///
/// on the nonzero spectrum `[a, b]`. `P_K(0) = 0`, and `[a, b]` is mapped into
/// `[1 - 1/T_K(t), 1 + 1/T_K(t)]`.
///
/// Evaluation goes through the three-term recurrence so that one application
/// costs exactly `K` Laplacian products. The per-step helpers are elementwise,
/// which lets a node run its own block of the recurrence and land on the same
/// bits as the centralized operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevPolynomial {
    degree: usize,
    t: f64,
    c: f64,
    scale: f64,
    /// `Some(lambda)` when the nonzero spectrum is a single point. The
    /// polynomial then degenerates to `1 - (1 - x/lambda)^K`.
    flat: Option<f64>,
}

impl ChebyshevPolynomial {
    pub fn new(degree: usize, lambda_min_pos: f64, lambda_max: f64) -> Result<Self, TopologyError> {
        if degree == 0 {
            return Err(TopologyError::InvalidDegree(0));
        }
        let (a, b) = (lambda_min_pos, lambda_max);
        if b - a <= 1e-9 * b {
            return Ok(ChebyshevPolynomial { degree, t: 1.0, c: 0.0, scale: 1.0, flat: Some(b) });
        }
        let t = (b + a) / (b - a);
        let c = 2.0 / (b - a);
        let mut p = ChebyshevPolynomial { degree, t, c, scale: 1.0, flat: None };
        // T_K(t) through the same recurrence at x = 0
        let mut prev = 1.0;
        let mut cur = t;
        for _ in 1..degree {
            let next = 2.0 * (t * cur) - prev;
            prev = cur;
            cur = next;
        }
        p.scale = cur;
        Ok(p)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Recurrence step `k -> k + 1`. At `k = 0` the argument `prev` is ignored
    /// and `cur` must equal `v`.
    pub fn step(&self, k: usize, cur: &[f64], w_cur: &[f64], prev: &[f64]) -> Vec<f64> {
        if let Some(lam) = self.flat {
            return cur.iter().zip(w_cur).map(|(a, wa)| a - wa / lam).collect();
        }
        let (t, c) = (self.t, self.c);
        if k == 0 {
            cur.iter().zip(w_cur).map(|(a, wa)| t * a - c * wa).collect()
        } else {
            cur.iter().zip(w_cur).zip(prev).map(|((a, wa), p)| 2.0 * (t * a - c * wa) - p).collect()
        }
    }

    /// `P_K(W) v` from `v` and the last recurrence term.
    pub fn finish(&self, v: &[f64], last: &[f64]) -> Vec<f64> {
        let s = self.scale;
        v.iter().zip(last).map(|(a, l)| a - l / s).collect()
    }

    /// Runs the full recurrence with `lap` as the Laplacian product.
    pub fn apply_with<F>(&self, v: &[f64], mut lap: F) -> Vec<f64>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let mut prev = v.to_vec();
        let mut cur = v.to_vec();
        for k in 0..self.degree {
            let w = lap(&cur);
            let next = self.step(k, &cur, &w, &prev);
            prev = cur;
            cur = next;
        }
        self.finish(v, &cur)
    }

    /// Scalar value `P_K(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        self.apply_with(&[1.0], |v| vec![x * v[0]])[0]
    }
}

/// `P_K(W̄)` lifted to blocks; one application costs `K` communication rounds.
#[derive(Debug, Clone)]
pub struct ChebyshevOperator {
    base: InteractionMatrix,
    poly: ChebyshevPolynomial,
    eigenvalues: Vec<f64>,
    sqrt: DMatrix<f64>,
    spectral: SpectralData,
}

pub fn chebyshev_accelerate(
    w: &InteractionMatrix,
    degree: ChebyshevDegree,
) -> Result<ChebyshevOperator, TopologyError> {
    let s = w.spectral();
    let k = match degree {
        // guard against chi = 1 + rounding pushing the ceiling to 2
        ChebyshevDegree::Auto => ((s.chi.sqrt() - 1e-9).ceil() as usize).max(1),
        ChebyshevDegree::Fixed(k) => k,
    };
    let poly = ChebyshevPolynomial::new(k, s.lambda_min_pos, s.lambda_max)?;
    let eigenvalues: Vec<f64> = w.eigenvalues().iter().map(|&e| if e == 0.0 { 0.0 } else { poly.eval(e) }).collect();
    let (spectral, _) = SpectralData::from_eigenvalues(&eigenvalues, s.eigen_tol);
    let sqrt = psd_sqrt(&eigenvalues, w.eigenvectors());
    Ok(ChebyshevOperator { base: w.clone(), poly, eigenvalues, sqrt, spectral })
}

impl ChebyshevOperator {
    pub fn base(&self) -> &InteractionMatrix {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn effective_spectral(&self) -> &SpectralData {
        &self.spectral
    }
}

impl InteractionOperator for ChebyshevOperator {
    fn graph(&self) -> &Graph {
        self.base.graph()
    }

    fn block_dim(&self) -> usize {
        self.base.block_dim()
    }

    fn spectral(&self) -> &SpectralData {
        &self.spectral
    }

    fn rounds_per_apply(&self) -> usize {
        self.poly.degree()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>, TopologyError> {
        self.check_len(x)?;
        Ok(self.poly.apply_with(x, |v| self.base.apply(v).expect("length checked above")))
    }

    fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    fn eigenvectors(&self) -> &DMatrix<f64> {
        self.base.eigenvectors()
    }

    fn sqrt_matrix(&self) -> &DMatrix<f64> {
        &self.sqrt
    }

    fn chebyshev(&self) -> Option<&ChebyshevPolynomial> {
        Some(&self.poly)
    }
}
