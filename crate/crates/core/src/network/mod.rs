//! In-process message-passing simulator.
//!
//! Every node owns a [`NodeState`]. A synchronous round copies each node's
//! outgoing block into the inboxes of its neighbors; afterwards a node may
//! read its own state and its inbox and nothing else. Reads of anything else
//! go through [`Network::read`], which records a [`LocalityViolation`].

mod consensus;
mod distributed;

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{laplacian_row, ChebyshevPolynomial, Graph, TopologyError};
use crate::objectives::ObjectiveError;
use crate::solver::SolverError;

pub use consensus::{
    accelerated_consensus, epsilon_consensus_check, metropolis_weights, run_power_consensus, ConsensusMethod,
    ConsensusRun,
};
pub use distributed::{run_distributed_dual_fgm, SimulationOutcome};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("block of length {got} sent by node {node}, expected {expected}")]
    BlockSize { node: usize, expected: usize, got: usize },
    #[error("expected {expected} blocks, got {got}")]
    NodeCount { expected: usize, got: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no consensus after {rounds} rounds")]
    NoConsensus { rounds: usize },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A read of state that was neither the reader's own nor in its inbox.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityViolation {
    pub reader: usize,
    pub read_from: usize,
    pub round: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub id: usize,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub z_tilde: Vec<f64>,
    /// Last block received from each neighbor.
    pub inbox: BTreeMap<usize, Vec<f64>>,
}

impl NodeState {
    fn new(id: usize, n: usize) -> Self {
        NodeState { id, x: vec![0.0; n], z: vec![0.0; n], z_tilde: vec![0.0; n], inbox: BTreeMap::new() }
    }
}

/// One row of the per-round export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRow {
    pub round: usize,
    pub node: usize,
    pub z_norm: f64,
    pub x_norm: f64,
}

pub fn write_round_trace_csv<W: Write>(rows: &[RoundRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["round", "node", "z_norm", "x_norm"])?;
    for r in rows {
        w.write_record([
            r.round.to_string(),
            r.node.to_string(),
            format!("{:e}", r.z_norm),
            format!("{:e}", r.x_norm),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Network {
    graph: Graph,
    n: usize,
    nodes: Vec<NodeState>,
    rounds: usize,
    scalars_sent: usize,
    violations: Vec<LocalityViolation>,
}

impl Network {
    pub fn new(graph: Graph, n: usize) -> Result<Self, TopologyError> {
        if n == 0 {
            return Err(TopologyError::InvalidBlockDim);
        }
        let nodes = (0..graph.num_nodes()).map(|i| NodeState::new(i, n)).collect();
        Ok(Network { graph, n, nodes, rounds: 0, scalars_sent: 0, violations: Vec::new() })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn block_dim(&self) -> usize {
        self.n
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, i: usize) -> &NodeState {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub(crate) fn node_mut(&mut self, i: usize) -> &mut NodeState {
        &mut self.nodes[i]
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Scalars communicated so far; `2 |E| n` per round.
    pub fn scalars_sent(&self) -> usize {
        self.scalars_sent
    }

    pub fn violations(&self) -> &[LocalityViolation] {
        &self.violations
    }

    /// One synchronous round: node `i` sends `blocks[i]` to every neighbor.
    pub fn exchange(&mut self, blocks: &[Vec<f64>]) -> Result<(), NetworkError> {
        if blocks.len() != self.nodes.len() {
            return Err(NetworkError::NodeCount { expected: self.nodes.len(), got: blocks.len() });
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.len() != self.n {
                return Err(NetworkError::BlockSize { node: i, expected: self.n, got: b.len() });
            }
        }
        for i in 0..self.nodes.len() {
            for &j in self.graph.neighbors(i) {
                self.nodes[j].inbox.insert(i, blocks[i].clone());
                self.scalars_sent += self.n;
            }
        }
        self.rounds += 1;
        Ok(())
    }

    /// The block `reader` last received from `from`. Anything outside the
    /// reader's inbox is a violation and yields `None`.
    pub fn read(&mut self, reader: usize, from: usize) -> Option<&[f64]> {
        match self.nodes[reader].inbox.get(&from) {
            Some(b) => Some(b.as_slice()),
            None => {
                self.violations.push(LocalityViolation { reader, read_from: from, round: self.rounds });
                None
            }
        }
    }

    /// `(W̄ ⊗ I) v` restricted to node `i`, from its own block and its inbox.
    fn local_laplacian(&mut self, i: usize, own: &[f64]) -> Vec<f64> {
        let nbs = self.graph.neighbors(i).to_vec();
        let mut blocks = Vec::with_capacity(nbs.len());
        for j in nbs {
            // a missing block is recorded by `read`; use zeros so the run can finish and be audited
            blocks.push(self.read(i, j).map_or_else(|| vec![0.0; own.len()], <[f64]>::to_vec));
        }
        let refs: Vec<&[f64]> = blocks.iter().map(Vec::as_slice).collect();
        laplacian_row(own, &refs)
    }

    /// Applies the Laplacian, or a Chebyshev polynomial of it, to the blocks
    /// held by the nodes. One exchange per Laplacian product.
    pub fn apply_operator(
        &mut self,
        poly: Option<&ChebyshevPolynomial>,
        v: &[Vec<f64>],
    ) -> Result<Vec<Vec<f64>>, NetworkError> {
        let m = self.nodes.len();
        let lap = |net: &mut Network, cur: &[Vec<f64>]| -> Result<Vec<Vec<f64>>, NetworkError> {
            net.exchange(cur)?;
            Ok((0..m).map(|i| net.local_laplacian(i, &cur[i])).collect())
        };
        let Some(p) = poly else {
            return lap(self, v);
        };
        let mut prev = v.to_vec();
        let mut cur = v.to_vec();
        for k in 0..p.degree() {
            let w = lap(self, &cur)?;
            let next: Vec<Vec<f64>> = (0..m).map(|i| p.step(k, &cur[i], &w[i], &prev[i])).collect();
            prev = cur;
            cur = next;
        }
        Ok((0..m).map(|i| p.finish(&v[i], &cur[i])).collect())
    }
}

/// Every recorded read outside own state and inbox.
pub fn audit_locality(net: &Network) -> Vec<LocalityViolation> {
    let mut out = net.violations.clone();
    // inbox keys must stay within the neighborhood
    for node in &net.nodes {
        for &j in node.inbox.keys() {
            if !net.graph.has_edge(node.id, j) {
                out.push(LocalityViolation { reader: node.id, read_from: j, round: net.rounds });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_topology, TopologyKind};

    #[test]
    fn star_inboxes() {
        let g = generate_topology(TopologyKind::Star, 5, 0).unwrap();
        let mut net = Network::new(g, 2).unwrap();
        let blocks: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 1.0]).collect();
        net.exchange(&blocks).unwrap();
        let sizes: Vec<usize> = net.nodes().iter().map(|s| s.inbox.len()).collect();
        let hub = sizes.iter().position(|&s| s == 4).unwrap();
        assert_eq!(sizes.iter().filter(|&&s| s == 1).count(), 4);
        assert_eq!(net.graph().degree(hub), 4);
        assert_eq!(net.scalars_sent(), 2 * 4 * 2);
        assert!(audit_locality(&net).is_empty());
    }

    #[test]
    fn injected_nonlocal_read_is_reported() {
        let g = generate_topology(TopologyKind::Path, 5, 0).unwrap();
        let mut net = Network::new(g, 1).unwrap();
        net.exchange(&vec![vec![1.0]; 5]).unwrap();
        assert!(net.read(0, 1).is_some());
        assert!(net.read(0, 4).is_none());
        assert_eq!(audit_locality(&net), vec![LocalityViolation { reader: 0, read_from: 4, round: 1 }]);
    }

    #[test]
    fn wrong_block_size_rejected() {
        let g = generate_topology(TopologyKind::Path, 2, 0).unwrap();
        let mut net = Network::new(g, 2).unwrap();
        assert!(matches!(net.exchange(&[vec![1.0], vec![1.0, 2.0]]), Err(NetworkError::BlockSize { node: 0, .. })));
        assert_eq!(net.rounds(), 0);
    }
}
