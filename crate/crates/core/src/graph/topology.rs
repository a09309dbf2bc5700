use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TopologyError;

const RANDOM_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    Path,
    Star,
    Complete,
    Cycle,
    RandomConnected,
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TopologyKind::Path => "path",
            TopologyKind::Star => "star",
            TopologyKind::Complete => "complete",
            TopologyKind::Cycle => "cycle",
            TopologyKind::RandomConnected => "random_connected",
        };
        f.write_str(s)
    }
}

impl FromStr for TopologyKind {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "path" => Ok(TopologyKind::Path),
            "star" => Ok(TopologyKind::Star),
            "complete" => Ok(TopologyKind::Complete),
            "cycle" => Ok(TopologyKind::Cycle),
            "random" | "random_connected" => Ok(TopologyKind::RandomConnected),
            other => Err(TopologyError::Parse(format!("unknown topology '{other}'"))),
        }
    }
}

/// Undirected simple graph on nodes `0..m`.
///
/// Edges are stored as `(i, j)` with `i < j`, sorted; adjacency lists are
/// sorted ascending. Every neighbor sum in the crate iterates in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    m: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Validates and builds a graph. Connectivity is not checked here; see
    /// [`Graph::is_connected`] and [`build_laplacian`](super::build_laplacian).
    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Result<Self, TopologyError> {
        if m < 2 {
            return Err(TopologyError::InvalidSize(m));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b || a >= m || b >= m {
                return Err(TopologyError::InvalidEdge(a, b));
            }
            let e = (a.min(b), a.max(b));
            if !set.insert(e) {
                return Err(TopologyError::DuplicateEdge(e.0, e.1));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); m];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph { m, edges, adjacency })
    }

    pub fn num_nodes(&self) -> usize {
        self.m
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.m && self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.m];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for &j in &self.adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == self.m
    }
}

/// Builds one of the standard topology families.
///
/// `seed` only matters for [`TopologyKind::RandomConnected`], which samples
/// Erdős–Rényi graphs with edge probability `2 ln(m) / m` until one is
/// connected (at most 100 attempts).
pub fn generate_topology(kind: TopologyKind, m: usize, seed: u64) -> Result<Graph, TopologyError> {
    if m < 2 {
        return Err(TopologyError::InvalidSize(m));
    }
    let edges: Vec<(usize, usize)> = match kind {
        TopologyKind::Path => (0..m - 1).map(|i| (i, i + 1)).collect(),
        TopologyKind::Star => (1..m).map(|i| (0, i)).collect(),
        TopologyKind::Complete => (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect(),
        TopologyKind::Cycle => {
            let mut e: Vec<_> = (0..m - 1).map(|i| (i, i + 1)).collect();
            // a 2-cycle would duplicate the single edge
            if m > 2 {
                e.push((0, m - 1));
            }
            e
        }
        TopologyKind::RandomConnected => return random_connected(m, seed),
    };
    Graph::from_edges(m, &edges)
}

fn random_connected(m: usize, seed: u64) -> Result<Graph, TopologyError> {
    let p = (2.0 * (m as f64).ln() / m as f64).min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_RETRIES {
        let mut edges = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                if rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(m, &edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(TopologyError::GenerationFailed(RANDOM_RETRIES))
}

/// JSON topology description: `{"kind": "path", "m": 8, "n": 1, "seed": 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologySpec {
    pub kind: TopologyKind,
    pub m: usize,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> usize {
    1
}

impl TopologySpec {
    pub fn graph(&self) -> Result<Graph, TopologyError> {
        generate_topology(self.kind, self.m, self.seed)
    }
}

/// Short form `kind:m[:seed]`, e.g. `path:30` or `random_connected:20:7`.
impl FromStr for TopologySpec {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(TopologyError::Parse(format!("expected kind:m[:seed], got '{s}'")));
        }
        let kind = parts[0].parse()?;
        let m = parts[1].trim().parse().map_err(|_| TopologyError::Parse(format!("bad node count '{}'", parts[1])))?;
        let seed = match parts.get(2) {
            Some(v) => v.trim().parse().map_err(|_| TopologyError::Parse(format!("bad seed '{v}'")))?,
            None => 0,
        };
        Ok(TopologySpec { kind, m, n: 1, seed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_spec() {
        let s: TopologySpec = "path:30".parse().unwrap();
        assert_eq!(s, TopologySpec { kind: TopologyKind::Path, m: 30, n: 1, seed: 0 });
        let s: TopologySpec = "random_connected:12:7".parse().unwrap();
        assert_eq!((s.kind, s.seed), (TopologyKind::RandomConnected, 7));
        assert!("ring:5".parse::<TopologySpec>().is_err());
        assert!("path".parse::<TopologySpec>().is_err());
        assert!("path:x".parse::<TopologySpec>().is_err());
    }

    #[test]
    fn small_families() {
        let p = generate_topology(TopologyKind::Path, 3, 0).unwrap();
        assert_eq!(p.edges(), &[(0, 1), (1, 2)]);
        let k = generate_topology(TopologyKind::Complete, 3, 0).unwrap();
        assert_eq!(k.edges(), &[(0, 1), (0, 2), (1, 2)]);
        let s = generate_topology(TopologyKind::Star, 4, 0).unwrap();
        assert_eq!(s.edges(), &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(s.degree(0), 3);
        let c = generate_topology(TopologyKind::Cycle, 4, 0).unwrap();
        assert_eq!(c.num_edges(), 4);
        assert!(c.has_edge(3, 0));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(generate_topology(TopologyKind::Path, 1, 0), Err(TopologyError::InvalidSize(1)));
        assert_eq!(Graph::from_edges(3, &[(1, 1)]), Err(TopologyError::InvalidEdge(1, 1)));
        assert_eq!(Graph::from_edges(3, &[(0, 1), (1, 0)]), Err(TopologyError::DuplicateEdge(0, 1)));
        assert!(!Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap().is_connected());
    }

    #[test]
    fn random_is_connected_and_seeded() {
        for seed in 0..20 {
            let a = generate_topology(TopologyKind::RandomConnected, 20, seed).unwrap();
            let b = generate_topology(TopologyKind::RandomConnected, 20, seed).unwrap();
            assert!(a.is_connected());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn spec_json() {
        let s: TopologySpec = serde_json::from_str(r#"{"kind":"random_connected","m":12,"n":2,"seed":3}"#).unwrap();
        assert_eq!(s.kind, TopologyKind::RandomConnected);
        assert_eq!(s.n, 2);
        assert!(s.graph().unwrap().is_connected());
    }
}
