//! Graph representation, vertex permutations, file formats, generators and
//! the spectral machinery shared by the rest of the crate.
//!
//! Adjacency matrices are dense, real and symmetric. Binary matrices with a
//! zero diagonal are "simple"; anything else is treated as a weighted graph
//! (weights may be negative and self-loops are allowed).

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

mod brute;
mod formats;
mod generate;
mod spectral;

pub use brute::{brute_force_isomorphism, isomorphic_copy};
pub use formats::{emit_edge_list, emit_graph6, parse_edge_list, parse_graph6};
pub use generate::{generate, GraphModel};
pub use spectral::{spectral_gate, spectral_radius, spectrum, Spectrum};

/// Comparison tolerance for weighted adjacency matrices. Binary matrices are
/// always compared exactly.
pub const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph6 parse error at byte {offset}: {msg}")]
    Graph6Parse { offset: usize, msg: String },
    #[error("edge list parse error at line {line}: {msg}")]
    EdgeListParse { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("eigensolver failed to converge")]
    EigenFailure,
    #[error("eigendecomposition residual {residual:.3e} above tolerance")]
    EigenResidual { residual: f64 },
    #[error("unknown fixture name: {0}")]
    UnknownFixture(String),
}

/// An undirected graph stored as a dense symmetric adjacency matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    adjacency: DMatrix<f64>,
    label: Option<String>,
}

impl Graph {
    /// Wraps an adjacency matrix. The matrix must be square, non-empty and
    /// exactly symmetric.
    pub fn from_adjacency(adjacency: DMatrix<f64>) -> Result<Self, GraphError> {
        if adjacency.nrows() == 0 {
            return Err(GraphError::InvalidGraph("order must be at least 1".into()));
        }
        if adjacency.nrows() != adjacency.ncols() {
            return Err(GraphError::InvalidGraph(format!(
                "adjacency matrix is {}x{}, not square",
                adjacency.nrows(),
                adjacency.ncols()
            )));
        }
        for i in 0..adjacency.nrows() {
            for j in (i + 1)..adjacency.ncols() {
                if adjacency[(i, j)] != adjacency[(j, i)] {
                    return Err(GraphError::InvalidGraph(format!(
                        "asymmetric entries at ({i}, {j})"
                    )));
                }
            }
        }
        if adjacency.iter().any(|v| !v.is_finite()) {
            return Err(GraphError::InvalidGraph("non-finite entry".into()));
        }
        Ok(Self { adjacency, label: None })
    }

    /// Simple graph on `m` vertices from an undirected edge list.
    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut a = DMatrix::zeros(m, m);
        for &(i, j) in edges {
            if i >= m || j >= m {
                return Err(GraphError::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for order {m}"
                )));
            }
            if i == j {
                return Err(GraphError::InvalidGraph(format!(
                    "self-loop at vertex {i} in a simple graph"
                )));
            }
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        Self::from_adjacency(a)
    }

    /// Weighted graph from `(i, j, w)` triples; self-loops allowed, repeated
    /// entries last-write-wins.
    pub fn from_weighted_edges(m: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let mut a = DMatrix::zeros(m, m);
        for &(i, j, w) in edges {
            if i >= m || j >= m {
                return Err(GraphError::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for order {m}"
                )));
            }
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
        Self::from_adjacency(a)
    }

    pub fn empty(m: usize) -> Result<Self, GraphError> {
        Self::from_adjacency(DMatrix::zeros(m, m))
    }

    pub fn order(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// True when every entry is 0 or 1 and the diagonal is zero.
    pub fn is_binary_simple(&self) -> bool {
        let m = self.order();
        (0..m).all(|i| self.adjacency[(i, i)] == 0.0)
            && self.adjacency.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.adjacency.iter().all(|&v| v == 0.0)
    }

    /// Number of undirected edges; self-loops count once.
    pub fn edge_count(&self) -> usize {
        let m = self.order();
        let mut n = 0;
        for i in 0..m {
            for j in i..m {
                if self.adjacency[(i, j)] != 0.0 {
                    n += 1;
                }
            }
        }
        n
    }

    /// Row sums; for simple graphs these are vertex degrees.
    pub fn degrees(&self) -> Vec<f64> {
        (0..self.order()).map(|i| self.adjacency.row(i).sum()).collect()
    }

    /// Relabels vertices: output[pi(i)][pi(j)] = input[i][j].
    pub fn permuted(&self, pi: &Permutation) -> Graph {
        assert_eq!(pi.len(), self.order(), "permutation length mismatch");
        let m = self.order();
        let mut a = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                a[(pi.map(i), pi.map(j))] = self.adjacency[(i, j)];
            }
        }
        Graph { adjacency: a, label: self.label.clone() }
    }
}

/// A bijection on vertex indices, stored as the image vector: `map(i)` is the
/// vertex that `i` is sent to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self, GraphError> {
        let m = image.len();
        let mut seen = vec![false; m];
        for &v in &image {
            if v >= m || seen[v] {
                return Err(GraphError::InvalidGraph(format!(
                    "not a permutation of 0..{m}"
                )));
            }
            seen[v] = true;
        }
        Ok(Self(image))
    }

    pub fn identity(m: usize) -> Self {
        Self((0..m).collect())
    }

    pub fn map(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Self(inv)
    }

    /// `self` followed by `other`: i -> other(self(i)).
    pub fn then(&self, other: &Permutation) -> Self {
        assert_eq!(self.len(), other.len());
        Self(self.0.iter().map(|&v| other.map(v)).collect())
    }
}

/// Checks that `pi` maps `g1` onto `g2`: binary pairs compare exactly,
/// weighted pairs within [`WEIGHT_TOL`].
pub fn is_isomorphism(g1: &Graph, g2: &Graph, pi: &Permutation) -> bool {
    if g1.order() != g2.order() || pi.len() != g1.order() {
        return false;
    }
    let exact = g1.is_binary_simple() && g2.is_binary_simple();
    let (a1, a2) = (g1.adjacency(), g2.adjacency());
    let m = g1.order();
    for i in 0..m {
        for j in 0..m {
            let (x, y) = (a1[(i, j)], a2[(pi.map(i), pi.map(j))]);
            if exact {
                if x != y {
                    return false;
                }
            } else if (x - y).abs() > WEIGHT_TOL {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_matrix() {
        let mut a = DMatrix::zeros(2, 2);
        a[(0, 1)] = 1.0;
        assert!(Graph::from_adjacency(a).is_err());
    }

    #[test]
    fn rejects_empty_order() {
        assert!(Graph::empty(0).is_err());
    }

    #[test]
    fn rejects_self_loop_in_simple_graph() {
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
    }

    #[test]
    fn weighted_graph_allows_self_loops() {
        let g = Graph::from_weighted_edges(2, &[(0, 0, 0.5), (0, 1, -1.25)]).unwrap();
        assert_eq!(g.adjacency()[(0, 0)], 0.5);
        assert_eq!(g.adjacency()[(1, 0)], -1.25);
        assert!(!g.is_binary_simple());
    }

    #[test]
    fn permuted_moves_entries() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let pi = Permutation::new(vec![2, 0, 1]).unwrap();
        let h = g.permuted(&pi);
        assert_eq!(h.adjacency()[(2, 0)], 1.0);
        assert_eq!(h.adjacency()[(0, 2)], 1.0);
        assert_eq!(h.edge_count(), 1);
        assert!(is_isomorphism(&g, &h, &pi));
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        let pi = Permutation::new(vec![1, 2, 0]).unwrap();
        assert_eq!(pi.then(&pi.inverse()), Permutation::identity(3));
    }

    #[test]
    fn identity_is_isomorphism_on_itself() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(is_isomorphism(&g, &g, &Permutation::identity(4)));
    }
}
