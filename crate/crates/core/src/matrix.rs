//! Symmetric matrices: dense weighted storage for the latent adjacency and
//! compressed upper-triangle storage for observed and reweighted graphs.

use crate::error::{Error, Result};

/// Read-only access to a symmetric linear operator.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// Writes `M x` into `y`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn frobenius_norm(&self) -> f64;

    fn row_sums(&self) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        self.apply(&vec![1.0; n], &mut y);
        y
    }
}

/// Dense symmetric matrix with zero diagonal and entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetric {
    n: usize,
    data: Vec<f64>,
}

impl DenseSymmetric {
    /// Builds the matrix from the upper triangle; `f(i, j)` is called once per `i < j`.
    pub fn from_upper<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let w = f(i, j);
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({i}, {j}) = {w} outside [0, 1]"
                    )));
                }
                data[i * n + j] = w;
                data[j * n + i] = w;
            }
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

impl SymmetricOperator for DenseSymmetric {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

/// Undirected simple graph stored as CSR over the strict upper triangle.
///
/// Row `i` lists the neighbours `j > i` in increasing order. Entries are
/// implicitly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGraph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl SparseGraph {
    pub fn empty(n: usize) -> Self {
        Self { n, offsets: vec![0; n + 1], targets: Vec::new() }
    }

    /// Builds a graph from undirected edges listed once each, in any orientation.
    ///
    /// Self-loops and out-of-range ids are rejected with `InvalidEdge`; a repeated
    /// edge is rejected with `DuplicateEdge` carrying its 0-based position.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut upper: Vec<(usize, usize, usize)> = Vec::with_capacity(edges.len());
        for (row, &(a, b)) in edges.iter().enumerate() {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidEdge(a, b));
            }
            upper.push((a.min(b), a.max(b), row));
        }
        upper.sort_unstable();
        for w in upper.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::DuplicateEdge { row: w[0].2.max(w[1].2), i: w[0].0, j: w[0].1 });
            }
        }
        let mut offsets = vec![0; n + 1];
        for &(i, _, _) in &upper {
            offsets[i + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = upper.into_iter().map(|(_, j, _)| j).collect();
        Ok(Self { n, offsets, targets })
    }

    /// Assembles a graph from rows already in upper-triangle CSR order.
    pub(crate) fn from_sorted_rows(n: usize, offsets: Vec<usize>, targets: Vec<usize>) -> Self {
        debug_assert_eq!(offsets.len(), n + 1);
        Self { n, offsets, targets }
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    /// Upper-triangle neighbours of `i`.
    pub fn upper_neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Iterates edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.upper_neighbors(i).iter().map(move |&j| (i, j)))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for (i, j) in self.edges() {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = (i.min(j), i.max(j));
        a != b && b < self.n && self.upper_neighbors(a).binary_search(&b).is_ok()
    }

    pub fn to_dense(&self) -> DenseSymmetric {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for (i, j) in self.edges() {
            data[i * n + j] = 1.0;
            data[j * n + i] = 1.0;
        }
        DenseSymmetric { n, data }
    }
}

impl SymmetricOperator for SparseGraph {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let mut acc = 0.0;
            for &j in self.upper_neighbors(i) {
                acc += x[j];
                y[j] += x[i];
            }
            y[i] += acc;
        }
    }

    fn frobenius_norm(&self) -> f64 {
        (2.0 * self.num_edges() as f64).sqrt()
    }
}

/// Symmetric weighted graph in the same upper-triangle CSR layout as [`SparseGraph`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    structure: SparseGraph,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Attaches one weight per upper-triangle entry, in `structure.edges()` order.
    pub fn new(structure: SparseGraph, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != structure.num_edges() {
            return Err(Error::LengthMismatch { expected: structure.num_edges(), got: weights.len() });
        }
        Ok(Self { structure, weights })
    }

    pub fn structure(&self) -> &SparseGraph {
        &self.structure
    }

    /// Iterates `(i, j, w)` with `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.structure.edges().zip(&self.weights).map(|((i, j), &w)| (i, j, w))
    }

    pub fn to_dense(&self) -> DenseSymmetric {
        let n = self.structure.n;
        let mut data = vec![0.0; n * n];
        for (i, j, w) in self.entries() {
            data[i * n + j] = w;
            data[j * n + i] = w;
        }
        DenseSymmetric { n, data }
    }
}

impl SymmetricOperator for WeightedGraph {
    fn dim(&self) -> usize {
        self.structure.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        let s = &self.structure;
        for i in 0..s.n {
            let mut acc = 0.0;
            for k in s.offsets[i]..s.offsets[i + 1] {
                let (j, w) = (s.targets[k], self.weights[k]);
                acc += w * x[j];
                y[j] += w * x[i];
            }
            y[i] += acc;
        }
    }

    fn frobenius_norm(&self) -> f64 {
        (2.0 * self.weights.iter().map(|w| w * w).sum::<f64>()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> SparseGraph {
        SparseGraph::from_edges(3, &[(1, 0), (1, 2)]).unwrap()
    }

    #[test]
    fn csr_keeps_upper_triangle() {
        let g = path3();
        assert_eq!(g.upper_neighbors(0), &[1]);
        assert_eq!(g.upper_neighbors(1), &[2]);
        assert!(g.upper_neighbors(2).is_empty());
        assert!(g.has_edge(2, 1));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(SparseGraph::from_edges(3, &[(1, 1)]), Err(Error::InvalidEdge(1, 1)));
        assert_eq!(SparseGraph::from_edges(3, &[(0, 3)]), Err(Error::InvalidEdge(0, 3)));
        assert_eq!(
            SparseGraph::from_edges(3, &[(0, 1), (1, 2), (1, 0)]),
            Err(Error::DuplicateEdge { row: 2, i: 0, j: 1 })
        );
    }

    #[test]
    fn sparse_and_dense_apply_agree() {
        let g = path3();
        let x = [1.0, -2.0, 0.5];
        let (mut a, mut b) = ([0.0; 3], [0.0; 3]);
        g.apply(&x, &mut a);
        g.to_dense().apply(&x, &mut b);
        assert_eq!(a, b);
        assert_eq!(a, [-2.0, 1.5, -2.0]);
        assert_eq!(g.degrees(), vec![1, 2, 1]);
    }

    #[test]
    fn weighted_frobenius() {
        let w = WeightedGraph::new(path3(), vec![0.5, 2.0]).unwrap();
        assert!((w.frobenius_norm() - (2.0 * 4.25f64).sqrt()).abs() < 1e-15);
        assert_eq!(w.to_dense().get(2, 1), 2.0);
    }
}
