use std::sync::Arc;

use super::{Constants, NodeObjective, ObjectiveError, Proximal};

/// `F(x) = sum_i f_i(x_i)` over stacked `x = (x_1, ..., x_m)`.
///
/// Aggregate constants: `mu = min mu_i`, `L = max L_i`, and the Lipschitz
/// constant of `F` on stacked vectors `M = sqrt(sum M_i^2)`.
#[derive(Debug, Clone)]
pub struct SeparableObjective {
    nodes: Vec<Arc<dyn NodeObjective>>,
    n: usize,
}

impl SeparableObjective {
    pub fn new(nodes: Vec<Arc<dyn NodeObjective>>) -> Result<Self, ObjectiveError> {
        let first = nodes.first().ok_or(ObjectiveError::Empty)?;
        let n = first.dim();
        for (i, node) in nodes.iter().enumerate() {
            if node.dim() != n {
                return Err(ObjectiveError::NodeDimension { node: i, expected: n, got: node.dim() });
            }
        }
        Ok(SeparableObjective { nodes, n })
    }

    pub fn from_nodes<N: NodeObjective + 'static>(nodes: Vec<N>) -> Result<Self, ObjectiveError> {
        Self::new(nodes.into_iter().map(|n| Arc::new(n) as Arc<dyn NodeObjective>).collect())
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn block_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.nodes.len() * self.n
    }

    pub fn node(&self, i: usize) -> &dyn NodeObjective {
        self.nodes[i].as_ref()
    }

    pub fn nodes(&self) -> &[Arc<dyn NodeObjective>] {
        &self.nodes
    }

    pub fn constants(&self) -> Constants {
        let per: Vec<Constants> = self.nodes.iter().map(|n| n.constants()).collect();
        Constants {
            mu: per.iter().map(|c| c.mu).fold(f64::INFINITY, f64::min),
            l: per.iter().map(|c| c.l).fold(0.0, f64::max),
            m_lip: per.iter().map(|c| c.m_lip * c.m_lip).sum::<f64>().sqrt(),
        }
    }

    pub fn mu(&self) -> f64 {
        self.constants().mu
    }

    pub fn l(&self) -> f64 {
        self.constants().l
    }

    pub fn m_lip(&self) -> f64 {
        self.constants().m_lip
    }

    pub fn is_dual_friendly(&self) -> bool {
        self.nodes.iter().all(|n| n.is_dual_friendly())
    }

    pub fn is_coordinate_separable(&self) -> bool {
        self.nodes.iter().all(|n| n.is_coordinate_separable())
    }

    pub(crate) fn check_len(&self, x: &[f64]) -> Result<(), ObjectiveError> {
        if x.len() != self.dim() {
            return Err(ObjectiveError::Shape { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        self.check_len(x)?;
        Ok(self.nodes.iter().enumerate().map(|(i, f)| f.value(&x[i * self.n..(i + 1) * self.n])).sum())
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, ObjectiveError> {
        self.check_len(x)?;
        Ok(self.nodes.iter().enumerate().flat_map(|(i, f)| f.gradient(&x[i * self.n..(i + 1) * self.n])).collect())
    }

    /// Node-by-node conjugate maximizer `x*(u)`, optionally with a proximal
    /// term `(weight/2)||x - anchor||^2` on stacked vectors.
    pub fn conjugate_argmax(&self, u: &[f64], prox: Option<(f64, &[f64])>) -> Result<Vec<f64>, ObjectiveError> {
        self.check_len(u)?;
        if let Some((_, anchor)) = prox {
            self.check_len(anchor)?;
        }
        let n = self.n;
        let mut out = Vec::with_capacity(self.dim());
        for (i, f) in self.nodes.iter().enumerate() {
            out.extend(self.node_argmax(i, f.as_ref(), &u[i * n..(i + 1) * n], prox)?);
        }
        Ok(out)
    }

    /// Conjugate maximizer of node `i` alone; `prox` is given on stacked
    /// vectors and sliced here.
    pub fn node_conjugate_argmax(
        &self,
        i: usize,
        u_i: &[f64],
        prox: Option<(f64, &[f64])>,
    ) -> Result<Vec<f64>, ObjectiveError> {
        self.node_argmax(i, self.nodes[i].as_ref(), u_i, prox)
    }

    fn node_argmax(
        &self,
        i: usize,
        f: &dyn NodeObjective,
        u_i: &[f64],
        prox: Option<(f64, &[f64])>,
    ) -> Result<Vec<f64>, ObjectiveError> {
        let n = self.n;
        let p = prox.map(|(weight, anchor)| Proximal { weight, anchor: &anchor[i * n..(i + 1) * n] });
        f.conjugate_argmax(u_i, p).map_err(|e| match e {
            ObjectiveError::NotDualFriendly { .. } => ObjectiveError::NotDualFriendly { node: i },
            ObjectiveError::IllPosed { .. } => ObjectiveError::IllPosed { node: i },
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{AbsoluteNode, QuadraticNode, SoftplusNode};

    fn quad_pair() -> SeparableObjective {
        SeparableObjective::from_nodes(vec![
            QuadraticNode::isotropic(1.0, vec![0.0]).unwrap(),
            QuadraticNode::isotropic(1.0, vec![2.0]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(quad_pair().evaluate(&[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(quad_pair().evaluate(&[0.0, 2.0]).unwrap(), 0.0);
        let abs = SeparableObjective::from_nodes(vec![
            AbsoluteNode::new(1.0, vec![0.0]).unwrap(),
            AbsoluteNode::new(1.0, vec![0.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(abs.evaluate(&[-1.0, 3.0]).unwrap(), 4.0);
        assert_eq!(abs.evaluate(&[1.0]), Err(ObjectiveError::Shape { expected: 2, got: 1 }));
    }

    #[test]
    fn conjugate_examples() {
        let f = quad_pair();
        assert_eq!(f.conjugate_argmax(&[1.0, -1.0], None).unwrap(), vec![1.0, 1.0]);
        assert_eq!(f.conjugate_argmax(&[0.0, 0.0], None).unwrap(), vec![0.0, 2.0]);
    }

    #[test]
    fn errors_name_the_node() {
        let mixed: Vec<Arc<dyn NodeObjective>> = vec![
            Arc::new(QuadraticNode::isotropic(1.0, vec![0.0]).unwrap()),
            Arc::new(SoftplusNode::new(1.0, vec![0.0]).unwrap()),
        ];
        let f = SeparableObjective::new(mixed).unwrap();
        assert!(!f.is_dual_friendly());
        assert_eq!(f.conjugate_argmax(&[0.0, 0.0], None), Err(ObjectiveError::NotDualFriendly { node: 1 }));
        let abs = SeparableObjective::from_nodes(vec![
            AbsoluteNode::new(1.0, vec![0.0]).unwrap(),
            AbsoluteNode::new(1.0, vec![0.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(abs.conjugate_argmax(&[0.0, 2.0], None), Err(ObjectiveError::IllPosed { node: 1 }));
    }

    #[test]
    fn aggregate_constants() {
        let f = SeparableObjective::from_nodes(vec![
            QuadraticNode::isotropic(0.5, vec![0.0]).unwrap(),
            QuadraticNode::isotropic(3.0, vec![0.0]).unwrap(),
            QuadraticNode::isotropic(1.0, vec![0.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(f.mu(), 0.5);
        assert_eq!(f.l(), 3.0);
        let g = SeparableObjective::from_nodes(vec![
            AbsoluteNode::new(3.0, vec![0.0]).unwrap(),
            AbsoluteNode::new(4.0, vec![0.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(g.m_lip(), 5.0);
    }

    #[test]
    fn rejects_mixed_dimensions() {
        let r = SeparableObjective::from_nodes(vec![
            QuadraticNode::isotropic(1.0, vec![0.0]).unwrap(),
            QuadraticNode::isotropic(1.0, vec![0.0, 1.0]).unwrap(),
        ]);
        assert_eq!(r.unwrap_err(), ObjectiveError::NodeDimension { node: 1, expected: 1, got: 2 });
        assert_eq!(SeparableObjective::new(vec![]).unwrap_err(), ObjectiveError::Empty);
    }
}
