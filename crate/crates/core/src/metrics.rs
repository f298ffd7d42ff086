//! Ranking metrics for alignment quality.
//!
//! For a test pair (x, y), the rank of y is its competition rank among all
//! second-graph candidates ordered by S(x, .) descending:
//! `rank = 1 + #{y' : S(x,y') > S(x,y)}`. Ties therefore do not penalize,
//! which scores constant rows optimistically; [`compute_ranks_pessimistic`]
//! counts ties against the pair (`1 + #{y' != y : S(x,y') >= S(x,y)}`) and
//! is reported as a diagnostic. Metrics are computed in the first-to-second
//! graph direction only.

use ndarray::Array2;
use serde::Serialize;

use crate::graph::AnchorSet;
use crate::{Error, Result};

/// The rank a test pair achieved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankRecord {
    pub pair: (usize, usize),
    /// Competition rank, 1-based; at most n2.
    pub rank: usize,
}

fn ranks_with(
    plan: &Array2<f64>,
    test: &AnchorSet,
    count: impl Fn(f64, f64, bool) -> bool,
) -> Vec<RankRecord> {
    test.pairs()
        .iter()
        .map(|&(x, y)| {
            let row = plan.row(x);
            let target = row[y];
            let beaten = row
                .iter()
                .enumerate()
                .filter(|&(j, &v)| count(v, target, j == y))
                .count();
            RankRecord { pair: (x, y), rank: 1 + beaten }
        })
        .collect()
}

/// Competition ranks of the true counterparts (optimistic on ties).
pub fn compute_ranks(plan: &Array2<f64>, test: &AnchorSet) -> Vec<RankRecord> {
    ranks_with(plan, test, |v, target, _| v > target)
}

/// Pessimistic ranks: every tie other than the pair itself counts.
pub fn compute_ranks_pessimistic(plan: &Array2<f64>, test: &AnchorSet) -> Vec<RankRecord> {
    ranks_with(plan, test, |v, target, is_self| !is_self && v >= target)
}

/// Hits@K for each requested K, plus mean reciprocal rank.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub hits: Vec<(usize, f64)>,
    pub mrr: f64,
    pub num_pairs: usize,
}

pub fn alignment_metrics(ranks: &[RankRecord], ks: &[usize]) -> Result<MetricsReport> {
    if ranks.is_empty() {
        return Err(Error::Config("cannot compute metrics over zero test pairs".into()));
    }
    let n = ranks.len() as f64;
    let hits = ks
        .iter()
        .map(|&k| {
            let h = ranks.iter().filter(|r| r.rank <= k).count() as f64 / n;
            (k, h)
        })
        .collect();
    let mrr = ranks.iter().map(|r| 1.0 / r.rank as f64).sum::<f64>() / n;
    Ok(MetricsReport { hits, mrr, num_pairs: ranks.len() })
}

impl MetricsReport {
    pub fn hits_at(&self, k: usize) -> Option<f64> {
        self.hits.iter().find(|(kk, _)| *kk == k).map(|(_, h)| *h)
    }
}
