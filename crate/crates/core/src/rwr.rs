//! Random-walk-with-restart positional features.
//!
//! Alignment needs positional information: for each training anchor pair
//! (x, y) we run a restarting walk from x in the first graph and from y in
//! the second, so column k of both feature matrices measures proximity to
//! the same logical anchor. The walk score vector is the fixed point of
//!
//! ```text
//! r = (1 - beta) * W r + beta * e_anchor
//! ```
//!
//! solved by power iteration; the map contracts with factor (1 - beta) in
//! the L1 norm, so convergence is geometric even with isolated nodes
//! (whose walk columns are all zero and simply absorb mass).

use ndarray::Array2;
use rayon::prelude::*;

use crate::graph::{walk_matrix, AnchorSet, Graph, WalkMatrix};
use crate::{Error, Result};

/// Encoder input features: RWR scores per training anchor, then raw
/// attributes. Rows are nodes.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    values: Array2<f64>,
    rwr_width: usize,
}

impl FeatureMatrix {
    /// Wrap an existing matrix whose first `rwr_width` columns are walk
    /// scores. Mostly useful for tests and synthetic instances.
    pub fn from_raw(values: Array2<f64>, rwr_width: usize) -> Self {
        assert!(rwr_width <= values.ncols());
        FeatureMatrix { values, rwr_width }
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    /// Total feature width: anchor count plus attribute dimension.
    pub fn width(&self) -> usize {
        self.values.ncols()
    }

    /// Number of leading RWR columns.
    pub fn rwr_width(&self) -> usize {
        self.rwr_width
    }
}

/// Solve the restart fixed point for one anchor by power iteration,
/// starting from the one-hot restart vector.
pub fn rwr_vector(
    w: &WalkMatrix,
    anchor: usize,
    beta: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Config(format!("restart probability must be in (0, 1], got {beta}")));
    }
    if tol <= 0.0 {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let n = w.n();
    if anchor >= n {
        return Err(Error::Range(format!("anchor {anchor} outside graph with {n} nodes")));
    }
    let mut r = vec![0.0; n];
    r[anchor] = 1.0;
    let mut wr = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        w.matrix().matvec(&r, &mut wr);
        let mut diff = 0.0;
        for i in 0..n {
            let next = (1.0 - beta) * wr[i] + if i == anchor { beta } else { 0.0 };
            diff += (next - r[i]).abs();
            r[i] = next;
        }
        residual = diff;
        // ||r_new - F(r_new)||_1 <= (1 - beta) * ||r_new - r_old||_1 <= diff
        if diff <= tol {
            return Ok(r);
        }
    }
    Err(Error::NonConvergence { what: "random walk with restart", iterations: max_iter, residual })
}

/// Build the paired feature matrices [R1 || X1] and [R2 || X2] for the
/// two graphs from the training anchors.
///
/// Column k of either RWR block corresponds to anchor pair k, in the order
/// of the training anchor list. When attributes are present they must have
/// the same dimension on both sides (the encoder is shared).
pub fn build_features(
    g1: &Graph,
    g2: &Graph,
    train_anchors: &AnchorSet,
    beta: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(FeatureMatrix, FeatureMatrix)> {
    train_anchors.validate_against(g1, g2)?;
    match (g1.attributes(), g2.attributes()) {
        (Some(a1), Some(a2)) if a1.ncols() != a2.ncols() => {
            return Err(Error::Shape(format!(
                "attribute dimensions differ between graphs ({} vs {})",
                a1.ncols(),
                a2.ncols()
            )));
        }
        (Some(_), None) | (None, Some(_)) => {
            return Err(Error::Shape(
                "attributes present on only one graph; the encoder input must match".into(),
            ));
        }
        _ => {}
    }
    let w1 = walk_matrix(g1);
    let w2 = walk_matrix(g2);
    let f1 = features_one_side(g1, &w1, train_anchors, 0, beta, tol, max_iter)?;
    let f2 = features_one_side(g2, &w2, train_anchors, 1, beta, tol, max_iter)?;
    Ok((f1, f2))
}

fn features_one_side(
    g: &Graph,
    w: &WalkMatrix,
    anchors: &AnchorSet,
    side: usize,
    beta: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FeatureMatrix> {
    let n = g.n();
    let l = anchors.len();
    let d = g.attr_dim();
    // walks for distinct anchors are independent; columns are written by
    // anchor index, so the result does not depend on completion order, and
    // a deterministic first error is picked by the sequential scan below
    let columns: Vec<Result<Vec<f64>>> = anchors
        .pairs()
        .par_iter()
        .map(|&(x, y)| {
            let anchor = if side == 0 { x } else { y };
            rwr_vector(w, anchor, beta, tol, max_iter)
        })
        .collect();
    let mut values = Array2::zeros((n, l + d));
    for (k, column) in columns.into_iter().enumerate() {
        let r = column?;
        for (i, &v) in r.iter().enumerate() {
            values[[i, k]] = v;
        }
    }
    if let Some(attrs) = g.attributes() {
        values.slice_mut(ndarray::s![.., l..]).assign(attrs);
    }
    Ok(FeatureMatrix { values, rwr_width: l })
}
