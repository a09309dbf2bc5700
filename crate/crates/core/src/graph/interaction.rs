use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::chebyshev::ChebyshevPolynomial;
use super::{Graph, TopologyError};

/// Relative threshold below which a Laplacian eigenvalue counts as zero.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-9;

/// Extreme nonzero eigenvalues of an interaction operator.
///
/// `lambda_max` and `lambda_min_pos` play the roles of `sigma_max(sqrt W)` and
/// `sigma_min(sqrt W)` in the crate-level convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub lambda_max: f64,
    pub lambda_min_pos: f64,
    pub chi: f64,
    pub eigen_tol: f64,
}

impl SpectralData {
    /// Builds spectral data from a list of eigenvalues, treating anything below
    /// `eigen_tol * max` as zero.
    pub fn from_eigenvalues(eigs: &[f64], eigen_tol: f64) -> (Self, usize) {
        let lambda_max = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let cut = eigen_tol * lambda_max;
        let zeros = eigs.iter().filter(|&&e| e.abs() <= cut).count();
        let lambda_min_pos = eigs.iter().cloned().filter(|&e| e > cut).fold(f64::INFINITY, f64::min);
        let spectral = SpectralData { lambda_max, lambda_min_pos, chi: lambda_max / lambda_min_pos, eigen_tol };
        (spectral, zeros)
    }

    pub fn sqrt_chi(&self) -> f64 {
        self.chi.sqrt()
    }
}

/// Linear consensus operator `W` acting on stacked vectors of length `m * n`.
///
/// Implemented by the plain Laplacian ([`InteractionMatrix`]) and by the
/// Chebyshev polynomial operator. Both share the Laplacian's eigenvectors,
/// which the provided methods use for the analysis-only quantities
/// (`sqrt W`, pseudo-inverse quadratic forms).
pub trait InteractionOperator: Send + Sync {
    fn graph(&self) -> &Graph;

    fn block_dim(&self) -> usize;

    fn spectral(&self) -> &SpectralData;

    /// Communication rounds consumed by one call to [`apply`](Self::apply).
    fn rounds_per_apply(&self) -> usize;

    /// Applies `W` blockwise. Only neighbor data enters each block.
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>, TopologyError>;

    /// Eigenvalues of the `m x m` operator, in the order of
    /// [`eigenvectors`](Self::eigenvectors). Kernel entries are exactly zero.
    fn eigenvalues(&self) -> &[f64];

    fn eigenvectors(&self) -> &DMatrix<f64>;

    /// PSD square root of the `m x m` operator. Analysis only.
    fn sqrt_matrix(&self) -> &DMatrix<f64>;

    /// Recurrence data when the operator is a Chebyshev polynomial of the
    /// Laplacian, `None` for the Laplacian itself.
    fn chebyshev(&self) -> Option<&ChebyshevPolynomial> {
        None
    }

    fn num_nodes(&self) -> usize {
        self.graph().num_nodes()
    }

    fn dim(&self) -> usize {
        self.num_nodes() * self.block_dim()
    }

    fn check_len(&self, x: &[f64]) -> Result<(), TopologyError> {
        if x.len() != self.dim() {
            return Err(TopologyError::Shape { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    /// Dense `m x m` matrix of the operator, rebuilt from its eigenpairs.
    fn dense_matrix(&self) -> DMatrix<f64> {
        let v = self.eigenvectors();
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(self.eigenvalues()));
        v * d * v.transpose()
    }

    /// `sqrt(W) x`, blockwise through the dense root.
    fn apply_sqrt(&self, x: &[f64]) -> Result<Vec<f64>, TopologyError> {
        self.check_len(x)?;
        Ok(dense_blockwise(self.sqrt_matrix(), x, self.block_dim()))
    }

    /// `x^T W x`, clamped at zero.
    fn quad_form(&self, x: &[f64]) -> Result<f64, TopologyError> {
        let wx = self.apply(x)?;
        Ok(crate::linalg::dot(x, &wx).max(0.0))
    }

    /// `g^T W^+ g` with `W^+` the Moore-Penrose pseudo-inverse.
    fn pinv_quad_form(&self, g: &[f64]) -> Result<f64, TopologyError> {
        self.check_len(g)?;
        let (m, n) = (self.num_nodes(), self.block_dim());
        let (eigs, vecs) = (self.eigenvalues(), self.eigenvectors());
        let mut total = 0.0;
        for c in 0..n {
            for (k, &lam) in eigs.iter().enumerate() {
                if lam == 0.0 {
                    continue;
                }
                let proj: f64 = (0..m).map(|i| vecs[(i, k)] * g[i * n + c]).sum();
                total += proj * proj / lam;
            }
        }
        Ok(total)
    }

    /// Minimum-norm solution `y` of `sqrt(W) y = g` for `g` in the range of
    /// `sqrt(W)`, i.e. `(sqrt W)^+ g`.
    fn sqrt_pinv_apply(&self, g: &[f64]) -> Result<Vec<f64>, TopologyError> {
        self.check_len(g)?;
        let (m, n) = (self.num_nodes(), self.block_dim());
        let (eigs, vecs) = (self.eigenvalues(), self.eigenvectors());
        let mut out = vec![0.0; m * n];
        for c in 0..n {
            for (k, &lam) in eigs.iter().enumerate() {
                if lam == 0.0 {
                    continue;
                }
                let proj: f64 = (0..m).map(|i| vecs[(i, k)] * g[i * n + c]).sum();
                let s = proj / lam.sqrt();
                for i in 0..m {
                    out[i * n + c] += s * vecs[(i, k)];
                }
            }
        }
        Ok(out)
    }
}

pub(crate) fn dense_blockwise(mat: &DMatrix<f64>, x: &[f64], n: usize) -> Vec<f64> {
    let m = mat.nrows();
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..m {
            let a = mat[(i, j)];
            if a != 0.0 {
                for c in 0..n {
                    out[i * n + c] += a * x[j * n + c];
                }
            }
        }
    }
    out
}

pub(crate) fn psd_sqrt(eigs: &[f64], vecs: &DMatrix<f64>) -> DMatrix<f64> {
    let roots: Vec<f64> = eigs.iter().map(|&e| e.max(0.0).sqrt()).collect();
    let d = DMatrix::from_diagonal(&DVector::from_vec(roots));
    vecs * d * vecs.transpose()
}

/// One block row of the Laplacian: `deg * own - sum(neighbors)`, subtracting
/// neighbors in the order given. The centralized operator and the simulator
/// both go through here.
pub(crate) fn laplacian_row(own: &[f64], neighbors: &[&[f64]]) -> Vec<f64> {
    let deg = neighbors.len() as f64;
    let mut out: Vec<f64> = own.iter().map(|v| deg * v).collect();
    for nb in neighbors {
        for (o, v) in out.iter_mut().zip(nb.iter()) {
            *o -= v;
        }
    }
    out
}

/// Graph Laplacian `W̄ = D - A` with its spectrum, lifted to blocks of size `n`.
#[derive(Debug, Clone)]
pub struct InteractionMatrix {
    graph: Graph,
    laplacian: DMatrix<f64>,
    n: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    sqrt: DMatrix<f64>,
    spectral: SpectralData,
}

/// Builds the Laplacian of `g`, lifted to block size `n`, and certifies
/// connectivity by counting near-zero eigenvalues.
pub fn build_laplacian(g: &Graph, n: usize, eigen_tol: f64) -> Result<InteractionMatrix, TopologyError> {
    if n == 0 {
        return Err(TopologyError::InvalidBlockDim);
    }
    let m = g.num_nodes();
    let mut lap = DMatrix::zeros(m, m);
    for &(a, b) in g.edges() {
        lap[(a, b)] = -1.0;
        lap[(b, a)] = -1.0;
    }
    for i in 0..m {
        lap[(i, i)] = g.degree(i) as f64;
    }

    let eig = SymmetricEigen::new(lap.clone());
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut eigenvectors = DMatrix::zeros(m, m);
    let mut eigenvalues = Vec::with_capacity(m);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[src]);
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }

    let (spectral, zeros) = SpectralData::from_eigenvalues(&eigenvalues, eigen_tol);
    if zeros != 1 {
        return Err(TopologyError::Disconnected { zero_eigenvalues: zeros });
    }
    let cut = eigen_tol * spectral.lambda_max;
    for e in eigenvalues.iter_mut() {
        if e.abs() <= cut {
            *e = 0.0;
        }
    }
    let sqrt = psd_sqrt(&eigenvalues, &eigenvectors);
    Ok(InteractionMatrix { graph: g.clone(), laplacian: lap, n, eigenvalues, eigenvectors, sqrt, spectral })
}

impl InteractionMatrix {
    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    /// Same graph and spectrum with a different block size.
    pub fn with_block_dim(&self, n: usize) -> Result<Self, TopologyError> {
        if n == 0 {
            return Err(TopologyError::InvalidBlockDim);
        }
        Ok(InteractionMatrix { n, ..self.clone() })
    }

    /// Dense PSD square root of `W̄` (kernel eigenvalues zeroed).
    pub fn sqrt_laplacian(&self) -> DMatrix<f64> {
        self.sqrt.clone()
    }

    /// Writes `W̄` as headerless row-major CSV.
    pub fn write_laplacian_csv(&self, path: &Path) -> Result<(), TopologyError> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_path(path)
            .map_err(|e| TopologyError::Io(e.to_string()))?;
        for i in 0..self.laplacian.nrows() {
            let row: Vec<String> = self.laplacian.row(i).iter().map(|v| v.to_string()).collect();
            w.write_record(&row).map_err(|e| TopologyError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| TopologyError::Io(e.to_string()))
    }
}

impl InteractionOperator for InteractionMatrix {
    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn block_dim(&self) -> usize {
        self.n
    }

    fn spectral(&self) -> &SpectralData {
        &self.spectral
    }

    fn rounds_per_apply(&self) -> usize {
        1
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>, TopologyError> {
        self.check_len(x)?;
        let n = self.n;
        let mut out = Vec::with_capacity(x.len());
        for i in 0..self.graph.num_nodes() {
            let nbs: Vec<&[f64]> = self.graph.neighbors(i).iter().map(|&j| &x[j * n..(j + 1) * n]).collect();
            out.extend(laplacian_row(&x[i * n..(i + 1) * n], &nbs));
        }
        Ok(out)
    }

    fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    fn sqrt_matrix(&self) -> &DMatrix<f64> {
        &self.sqrt
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_topology, TopologyKind};
    use approx::assert_relative_eq;

    fn lap(kind: TopologyKind, m: usize, n: usize) -> InteractionMatrix {
        build_laplacian(&generate_topology(kind, m, 1).unwrap(), n, DEFAULT_EIGEN_TOL).unwrap()
    }

    #[test]
    fn path3_laplacian_entries() {
        let w = lap(TopologyKind::Path, 3, 1);
        let expected = DMatrix::from_row_slice(3, 3, &[1., -1., 0., -1., 2., -1., 0., -1., 1.]);
        assert_eq!(w.laplacian(), &expected);
        assert_relative_eq!(w.spectral().lambda_max, 3.0, epsilon = 1e-12);
        assert_relative_eq!(w.spectral().lambda_min_pos, 1.0, epsilon = 1e-12);
        assert_relative_eq!(w.spectral().chi, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn complete3_is_perfectly_conditioned() {
        let w = lap(TopologyKind::Complete, 3, 1);
        let expected = DMatrix::from_row_slice(3, 3, &[2., -1., -1., -1., 2., -1., -1., -1., 2.]);
        assert_eq!(w.laplacian(), &expected);
        assert_relative_eq!(w.spectral().lambda_max, 3.0, epsilon = 1e-12);
        assert_relative_eq!(w.spectral().lambda_min_pos, 3.0, epsilon = 1e-12);
        assert_relative_eq!(w.spectral().chi, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn apply_examples() {
        let w = lap(TopologyKind::Path, 2, 1);
        assert_eq!(w.apply(&[3.5, 3.5]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(w.apply(&[0.0, 2.0]).unwrap(), vec![-2.0, 2.0]);
        assert_eq!(w.apply(&[1.0, 2.0, 3.0]), Err(TopologyError::Shape { expected: 2, got: 3 }));
        let w3 = lap(TopologyKind::Path, 3, 2);
        let v = [0.3, -1.7];
        let x: Vec<f64> = v.iter().cycle().take(6).cloned().collect();
        assert!(w3.apply(&x).unwrap().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn sqrt_of_k2() {
        let w = lap(TopologyKind::Path, 2, 1);
        let s = w.sqrt_laplacian();
        let r = 1.0 / 2f64.sqrt();
        assert_relative_eq!(s, DMatrix::from_row_slice(2, 2, &[r, -r, -r, r]), epsilon = 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let w = lap(TopologyKind::Path, 5, 1);
        let s = w.sqrt_laplacian();
        let err = (&s * &s - w.laplacian()).norm() / w.laplacian().norm();
        assert!(err < 1e-10, "{err}");
        let ones = DVector::from_element(5, 1.0);
        assert!((&s * ones).norm() < 1e-12);
    }

    #[test]
    fn star_chi_equals_m() {
        for m in [3, 5, 10, 17] {
            assert_relative_eq!(lap(TopologyKind::Star, m, 1).spectral().chi, m as f64, epsilon = 1e-9);
        }
    }

    #[test]
    fn disconnected_rejected() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            build_laplacian(&g, 1, DEFAULT_EIGEN_TOL).unwrap_err(),
            TopologyError::Disconnected { zero_eigenvalues: 2 }
        );
        assert_eq!(
            build_laplacian(&generate_topology(TopologyKind::Path, 3, 0).unwrap(), 0, 1e-9).unwrap_err(),
            TopologyError::InvalidBlockDim
        );
    }

    #[test]
    fn pinv_quad_form_matches_dense_pinv() {
        let w = lap(TopologyKind::Cycle, 6, 2);
        let g: Vec<f64> = (0..12).map(|k| (k as f64 * 0.7).sin()).collect();
        let pinv = w.laplacian().clone().pseudo_inverse(1e-10).unwrap();
        let lifted = dense_blockwise(&pinv, &g, 2);
        let expected = crate::linalg::dot(&g, &lifted);
        assert_relative_eq!(w.pinv_quad_form(&g).unwrap(), expected, max_relative = 1e-10);
    }

    #[test]
    fn laplacian_csv_round_trip() {
        let w = lap(TopologyKind::Star, 4, 1);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.csv");
        w.write_laplacian_csv(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().next().unwrap(), "3,-1,-1,-1");
        assert_eq!(text.lines().count(), 4);
    }
}
