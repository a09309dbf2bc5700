use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    AbsoluteNode, HuberNode, NodeObjective, ObjectiveError, QuadraticAbsNode, QuadraticNode, SeparableObjective,
    SoftplusNode,
};

fn unit() -> f64 {
    1.0
}

fn unit_range() -> [f64; 2] {
    [1.0, 1.0]
}

fn weak() -> f64 {
    1e-3
}

fn two() -> f64 {
    2.0
}

fn half() -> f64 {
    0.5
}

/// Named objective families, selectable from experiment configs as
/// `{"name": "huber", "params": {"delta": 0.5}}`.
///
/// Centers are drawn uniformly from `[-spread, spread]` with a generator
/// seeded from `(seed, m)`, so every network size gets its own instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case")]
pub enum ZooSpec {
    /// `(a_i/2)||v - b_i||^2`, `a_i` uniform in `curvature`.
    Quadratic {
        #[serde(default = "unit_range")]
        curvature: [f64; 2],
        #[serde(default = "unit")]
        spread: f64,
    },
    /// Unit quadratics except node `weak_node`, whose curvature is
    /// `weak_curvature`.
    IllConditioned {
        #[serde(default)]
        weak_node: usize,
        #[serde(default = "weak")]
        weak_curvature: f64,
        #[serde(default = "unit")]
        spread: f64,
    },
    Huber {
        #[serde(default = "half")]
        delta: f64,
        #[serde(default = "unit")]
        spread: f64,
    },
    Absolute {
        #[serde(default = "unit")]
        weight: f64,
        #[serde(default = "unit")]
        spread: f64,
    },
    QuadraticAbs {
        #[serde(default = "unit")]
        curvature: f64,
        #[serde(default = "unit")]
        weight: f64,
        #[serde(default = "unit")]
        spread: f64,
        #[serde(default = "two")]
        span: f64,
    },
    Softplus {
        #[serde(default = "unit")]
        curvature: f64,
        #[serde(default = "unit")]
        spread: f64,
    },
}

impl ZooSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ZooSpec::Quadratic { .. } => "quadratic",
            ZooSpec::IllConditioned { .. } => "ill_conditioned",
            ZooSpec::Huber { .. } => "huber",
            ZooSpec::Absolute { .. } => "absolute",
            ZooSpec::QuadraticAbs { .. } => "quadratic_abs",
            ZooSpec::Softplus { .. } => "softplus",
        }
    }

    pub fn quadratic() -> Self {
        ZooSpec::Quadratic { curvature: unit_range(), spread: 1.0 }
    }

    pub fn build(&self, m: usize, n: usize, seed: u64) -> Result<SeparableObjective, ObjectiveError> {
        if m == 0 || n == 0 {
            return Err(ObjectiveError::Empty);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ m as u64);
        let spread = match self {
            ZooSpec::Quadratic { spread, .. }
            | ZooSpec::IllConditioned { spread, .. }
            | ZooSpec::Huber { spread, .. }
            | ZooSpec::Absolute { spread, .. }
            | ZooSpec::QuadraticAbs { spread, .. }
            | ZooSpec::Softplus { spread, .. } => *spread,
        };
        if !(spread >= 0.0) || !spread.is_finite() {
            return Err(ObjectiveError::InvalidParameter("spread must be finite and nonnegative".into()));
        }
        let center =
            |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| rng.random_range(-spread..=spread)).collect() };
        let mut nodes: Vec<Arc<dyn NodeObjective>> = Vec::with_capacity(m);
        for i in 0..m {
            let node: Arc<dyn NodeObjective> = match *self {
                ZooSpec::Quadratic { curvature: [lo, hi], .. } => {
                    if !(lo > 0.0 && hi >= lo) {
                        return Err(ObjectiveError::InvalidParameter(
                            "curvature range must satisfy 0 < lo <= hi".into(),
                        ));
                    }
                    let a = rng.random_range(lo..=hi);
                    Arc::new(QuadraticNode::isotropic(a, center(&mut rng))?)
                }
                ZooSpec::IllConditioned { weak_node, weak_curvature, .. } => {
                    let a = if i == weak_node % m { weak_curvature } else { 1.0 };
                    Arc::new(QuadraticNode::isotropic(a, center(&mut rng))?)
                }
                ZooSpec::Huber { delta, .. } => Arc::new(HuberNode::new(delta, center(&mut rng))?),
                ZooSpec::Absolute { weight, .. } => Arc::new(AbsoluteNode::new(weight, center(&mut rng))?),
                ZooSpec::QuadraticAbs { curvature, weight, span, .. } => {
                    let c = center(&mut rng);
                    let b = center(&mut rng);
                    Arc::new(QuadraticAbsNode::new(curvature, c, weight, b, span)?)
                }
                ZooSpec::Softplus { curvature, .. } => Arc::new(SoftplusNode::new(curvature, center(&mut rng))?),
            };
            nodes.push(node);
        }
        SeparableObjective::new(nodes)
    }
}
