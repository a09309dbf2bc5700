use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{audit_locality, LocalityViolation, Network, NetworkError};
use crate::graph::{chebyshev_accelerate, ChebyshevDegree, Graph, InteractionMatrix, InteractionOperator};
use crate::linalg::{extrapolate, momentum};

/// Hard stop for the consensus loops; far beyond anything a connected graph
/// of desk size needs.
const MAX_ROUNDS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsensusMethod {
    Power,
    Accelerated,
    Chebyshev,
}

impl ConsensusMethod {
    pub const ALL: [ConsensusMethod; 3] =
        [ConsensusMethod::Power, ConsensusMethod::Accelerated, ConsensusMethod::Chebyshev];

    /// Runs the method on the Laplacian `w` (block dimension 1).
    pub fn run(self, w: &InteractionMatrix, x0: &[f64], eps: f64) -> Result<ConsensusRun, NetworkError> {
        match self {
            ConsensusMethod::Power => run_power_consensus(w.graph(), x0, eps),
            ConsensusMethod::Accelerated => accelerated_consensus(w, x0, eps),
            ConsensusMethod::Chebyshev => {
                let p = chebyshev_accelerate(w, ChebyshevDegree::Auto)?;
                let mut run = accelerated_consensus(&p, x0, eps)?;
                run.method = ConsensusMethod::Chebyshev;
                Ok(run)
            }
        }
    }
}

impl fmt::Display for ConsensusMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConsensusMethod::Power => "power",
            ConsensusMethod::Accelerated => "accel",
            ConsensusMethod::Chebyshev => "chebyshev",
        })
    }
}

impl FromStr for ConsensusMethod {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "power" => Ok(ConsensusMethod::Power),
            "accel" | "accelerated" => Ok(ConsensusMethod::Accelerated),
            "chebyshev" | "cheb" => Ok(ConsensusMethod::Chebyshev),
            other => Err(NetworkError::Unsupported(format!("unknown consensus method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusRun {
    pub method: ConsensusMethod,
    pub x: Vec<f64>,
    /// Communication rounds, i.e. neighbor exchanges.
    pub rounds: usize,
    pub iterations: usize,
    pub violations: Vec<LocalityViolation>,
}

/// `||x - mean(x0)|| <= eps ||x0 - mean(x0)||`.
pub fn epsilon_consensus_check(x: &[f64], x0: &[f64], eps: f64) -> bool {
    if x.is_empty() || x.len() != x0.len() {
        return false;
    }
    let mean = x0.iter().sum::<f64>() / x0.len() as f64;
    let dev = |v: &[f64]| v.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>().sqrt();
    dev(x) <= eps * dev(x0)
}

/// Lazy Metropolis gossip matrix: `1 / (1 + max(deg i, deg j))` on edges,
/// the remainder of each row on the diagonal. Symmetric and doubly
/// stochastic.
pub fn metropolis_weights(g: &Graph) -> DMatrix<f64> {
    let m = g.num_nodes();
    let mut p = DMatrix::zeros(m, m);
    for i in 0..m {
        for &j in g.neighbors(i) {
            p[(i, j)] = 1.0 / (1.0 + g.degree(i).max(g.degree(j)) as f64);
        }
    }
    for i in 0..m {
        let off: f64 = g.neighbors(i).iter().map(|&j| p[(i, j)]).sum();
        p[(i, i)] = 1.0 - off;
    }
    p
}

fn check_x0(m: usize, x0: &[f64]) -> Result<(), NetworkError> {
    if x0.len() != m {
        return Err(NetworkError::NodeCount { expected: m, got: x0.len() });
    }
    Ok(())
}

/// Gossip `x <- P x` with the Metropolis matrix until eps-consensus.
///
/// Node `i` needs the degrees of its neighbors for its row of `P`; they are
/// taken as known before the run and not counted as rounds.
pub fn run_power_consensus(g: &Graph, x0: &[f64], eps: f64) -> Result<ConsensusRun, NetworkError> {
    let m = g.num_nodes();
    check_x0(m, x0)?;
    let p = metropolis_weights(g);
    let mut net = Network::new(g.clone(), 1)?;
    let mut x = x0.to_vec();
    let mut iterations = 0;
    while !epsilon_consensus_check(&x, x0, eps) {
        if iterations == MAX_ROUNDS {
            return Err(NetworkError::NoConsensus { rounds: net.rounds() });
        }
        let blocks: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
        net.exchange(&blocks)?;
        let mut next = Vec::with_capacity(m);
        for i in 0..m {
            let mut v = p[(i, i)] * x[i];
            for &j in g.neighbors(i) {
                v += p[(i, j)] * net.read(i, j).map_or(0.0, |b| b[0]);
            }
            next.push(v);
        }
        x = next;
        iterations += 1;
    }
    Ok(ConsensusRun {
        method: ConsensusMethod::Power,
        x,
        rounds: net.rounds(),
        iterations,
        violations: audit_locality(&net),
    })
}

/// Fast gradient method on `x^T W x / 2` from `x0` until eps-consensus.
///
/// The gradient step preserves the mean, and on its orthogonal complement the
/// objective is `lambda_min`-strongly convex, so the constant momentum of the
/// strongly convex method applies. With a Chebyshev operator each step costs
/// `K` rounds.
pub fn accelerated_consensus(op: &dyn InteractionOperator, x0: &[f64], eps: f64) -> Result<ConsensusRun, NetworkError> {
    if op.block_dim() != 1 {
        return Err(NetworkError::Unsupported("consensus runs on scalar node values".into()));
    }
    let m = op.num_nodes();
    check_x0(m, x0)?;
    let sp = op.spectral();
    let (l, mu) = (sp.lambda_max, sp.lambda_min_pos);
    let beta = momentum(l, mu);
    let poly = op.chebyshev().copied();
    let mut net = Network::new(op.graph().clone(), 1)?;
    let mut x = x0.to_vec();
    let mut y = x0.to_vec();
    let mut iterations = 0;
    while !epsilon_consensus_check(&x, x0, eps) {
        if iterations == MAX_ROUNDS {
            return Err(NetworkError::NoConsensus { rounds: net.rounds() });
        }
        let blocks: Vec<Vec<f64>> = y.iter().map(|&v| vec![v]).collect();
        let wy = net.apply_operator(poly.as_ref(), &blocks)?;
        let next: Vec<f64> = y.iter().zip(&wy).map(|(yi, g)| yi - g[0] / l).collect();
        y = extrapolate(&next, &x, beta);
        x = next;
        iterations += 1;
    }
    Ok(ConsensusRun {
        method: ConsensusMethod::Accelerated,
        x,
        rounds: net.rounds(),
        iterations,
        violations: audit_locality(&net),
    })
}
