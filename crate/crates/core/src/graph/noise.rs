//! Noise injection for robustness experiments.
//!
//! Structural noise flips a fixed number of distinct upper-triangle
//! adjacency positions (adding or deleting edges while preserving symmetry
//! and the zero diagonal); attribute noise toggles binary attribute entries.
//! Both are deterministic under a seed.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::Graph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Structural,
    Attribute,
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "structural" => Ok(NoiseKind::Structural),
            "attribute" => Ok(NoiseKind::Attribute),
            other => Err(Error::Config(format!(
                "unknown noise kind {other:?} (expected structural or attribute)"
            ))),
        }
    }
}

/// Map a linear index in [0, n(n-1)/2) to an upper-triangle position (i, j), i < j.
fn triangle_position(mut t: usize, n: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row_len = n - 1 - i;
        if t < row_len {
            return (i, i + 1 + t);
        }
        t -= row_len;
        i += 1;
    }
}

fn sample_distinct(rng: &mut ChaCha20Rng, total: usize, k: usize) -> Vec<usize> {
    let mut chosen = HashSet::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let t = rng.random_range(0..total);
        if chosen.insert(t) {
            out.push(t);
        }
    }
    out
}

/// Flip `round(p% * n^2 / 2)` distinct upper-triangle adjacency positions
/// (structural) or `round(p% * n * d)` attribute entries (attribute).
pub fn inject_noise(g: &Graph, kind: NoiseKind, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::Config(format!("noise percentage must be in [0, 100], got {p}")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    match kind {
        NoiseKind::Structural => {
            let n = g.n();
            let k = (p / 100.0 * (n * n) as f64 / 2.0).round() as usize;
            let total = n * (n - 1) / 2;
            if k > total {
                return Err(Error::Config(format!(
                    "cannot flip {k} distinct positions, only {total} available"
                )));
            }
            if k == 0 {
                return Ok(g.clone());
            }
            let mut edges: HashSet<(usize, usize)> = g.undirected_edges().into_iter().collect();
            for t in sample_distinct(&mut rng, total, k) {
                let pos = triangle_position(t, n);
                if !edges.remove(&pos) {
                    edges.insert(pos);
                }
            }
            let edge_vec: Vec<_> = edges.into_iter().collect();
            g.with_edges(&edge_vec)
        }
        NoiseKind::Attribute => {
            let attrs = g
                .attributes()
                .ok_or_else(|| Error::Config("attribute noise requires node attributes".into()))?;
            if attrs.iter().any(|&v| v != 0.0 && v != 1.0) {
                return Err(Error::Config("attribute noise requires binary attributes".into()));
            }
            let (n, d) = (attrs.nrows(), attrs.ncols());
            let k = (p / 100.0 * (n * d) as f64).round() as usize;
            if k == 0 {
                return Ok(g.clone());
            }
            let mut noisy = attrs.clone();
            for t in sample_distinct(&mut rng, n * d, k) {
                let (i, j) = (t / d, t % d);
                noisy[[i, j]] = 1.0 - noisy[[i, j]];
            }
            g.with_attributes(noisy)
        }
    }
}
