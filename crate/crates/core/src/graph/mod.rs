//! Graph data model, anchors, and the walk matrix.
//!
//! Networks are undirected and unweighted: a binary symmetric adjacency in
//! compressed-row form with zero diagonal, plus an optional dense node
//! attribute matrix. Anchors are known cross-network node pairs; a seeded
//! split divides them into the training pairs that supervise the run and
//! the held-out pairs evaluation ranks against.

mod io;
mod noise;

pub use io::{
    load_anchors, load_attributes, load_dataset, load_edge_list, write_dense_csv,
    write_edge_list,
};
pub use noise::{inject_noise, NoiseKind};

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// One network: sparse symmetric binary adjacency and optional attributes.
#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: CsrMatrix,
    attributes: Option<Array2<f64>>,
}

impl Graph {
    /// Build a graph from undirected edges. Each edge is stored in both
    /// directions; duplicates collapse to a single entry.
    pub fn new(n: usize, edges: &[(usize, usize)], attributes: Option<Array2<f64>>) -> Result<Self> {
        let mut directed: Vec<(usize, usize)> = Vec::with_capacity(edges.len() * 2);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Range(format!("edge ({u}, {v}) outside node range [0, {n})")));
            }
            if u == v {
                return Err(Error::Range(format!("self-loop at node {u} not allowed")));
            }
            directed.push((u, v));
            directed.push((v, u));
        }
        directed.sort_unstable();
        directed.dedup();
        let triplets = directed.into_iter().map(|(u, v)| (u, v, 1.0)).collect();
        let adjacency = CsrMatrix::from_triplets(n, n, triplets)?;
        if let Some(attrs) = &attributes {
            if attrs.nrows() != n {
                return Err(Error::Shape(format!(
                    "attribute matrix has {} rows, graph has {n} nodes",
                    attrs.nrows()
                )));
            }
        }
        Ok(Graph { adjacency, attributes })
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.adjacency.nnz() / 2
    }

    pub fn adjacency(&self) -> &CsrMatrix {
        &self.adjacency
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency.row_nnz(node)
    }

    pub fn attributes(&self) -> Option<&Array2<f64>> {
        self.attributes.as_ref()
    }

    pub fn attr_dim(&self) -> usize {
        self.attributes.as_ref().map_or(0, |a| a.ncols())
    }

    /// Undirected edge list with u < v, sorted.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        self.adjacency.iter().filter(|&(u, v, _)| u < v).map(|(u, v, _)| (u, v)).collect()
    }

    /// Replace the edge set, keeping node count and attributes.
    pub fn with_edges(&self, edges: &[(usize, usize)]) -> Result<Self> {
        Graph::new(self.n(), edges, self.attributes.clone())
    }

    /// Replace the attribute matrix, keeping the structure.
    pub fn with_attributes(&self, attributes: Array2<f64>) -> Result<Self> {
        if attributes.nrows() != self.n() {
            return Err(Error::Shape(format!(
                "attribute matrix has {} rows, graph has {} nodes",
                attributes.nrows(),
                self.n()
            )));
        }
        Ok(Graph { adjacency: self.adjacency.clone(), attributes: Some(attributes) })
    }
}

/// Whether an anchor set is the full ground truth or one side of a split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorRole {
    Full,
    Train,
    Test,
}

/// Known cross-network node correspondences.
#[derive(Debug, Clone)]
pub struct AnchorSet {
    pairs: Vec<(usize, usize)>,
    role: AnchorRole,
}

impl AnchorSet {
    /// Validates that no node id repeats on either side.
    pub fn new(pairs: Vec<(usize, usize)>, role: AnchorRole) -> Result<Self> {
        let mut left: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let mut right: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        left.sort_unstable();
        right.sort_unstable();
        if left.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("anchor node repeated on the first side".into()));
        }
        if right.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("anchor node repeated on the second side".into()));
        }
        Ok(AnchorSet { pairs, role })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn role(&self) -> AnchorRole {
        self.role
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Check every pair lies inside the two node ranges.
    pub fn validate_against(&self, g1: &Graph, g2: &Graph) -> Result<()> {
        for &(x, y) in &self.pairs {
            if x >= g1.n() {
                return Err(Error::Range(format!("anchor node {x} outside first graph (n={})", g1.n())));
            }
            if y >= g2.n() {
                return Err(Error::Range(format!("anchor node {y} outside second graph (n={})", g2.n())));
            }
        }
        Ok(())
    }
}

/// Deterministic train/test split of an anchor set.
///
/// A seeded shuffle selects `round(train_ratio * len)` training pairs; both
/// outputs keep the original list order so downstream feature columns are
/// reproducible from the input file alone.
pub fn split_anchors(
    anchors: &AnchorSet,
    train_ratio: f64,
    seed: u64,
) -> Result<(AnchorSet, AnchorSet)> {
    if anchors.is_empty() {
        return Err(Error::Config("cannot split an empty anchor list".into()));
    }
    if !(train_ratio > 0.0 && train_ratio < 1.0) {
        return Err(Error::Config(format!("train_ratio must be in (0, 1), got {train_ratio}")));
    }
    let n = anchors.len();
    let n_train = (train_ratio * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut train_idx = order[..n_train].to_vec();
    let mut test_idx = order[n_train..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    let train: Vec<_> = train_idx.iter().map(|&i| anchors.pairs[i]).collect();
    let test: Vec<_> = test_idx.iter().map(|&i| anchors.pairs[i]).collect();
    Ok((
        AnchorSet { pairs: train, role: AnchorRole::Train },
        AnchorSet { pairs: test, role: AnchorRole::Test },
    ))
}

/// Column-stochastic walk matrix W = (D^-1 A)^T.
///
/// Column j holds the out-distribution of node j: W(i, j) = A(j, i) / deg(j).
/// Columns of isolated nodes are all zero.
#[derive(Debug, Clone)]
pub struct WalkMatrix {
    matrix: CsrMatrix,
}

impl WalkMatrix {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn walk_matrix(g: &Graph) -> WalkMatrix {
    let n = g.n();
    let degrees: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
    let triplets: Vec<(usize, usize, f64)> = g
        .adjacency()
        .iter()
        .map(|(i, j, _)| (j, i, 1.0 / degrees[i] as f64))
        .collect();
    let matrix = CsrMatrix::from_triplets(n, n, triplets).expect("adjacency pattern is valid");
    WalkMatrix { matrix }
}
