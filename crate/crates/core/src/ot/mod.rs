//! Optimal-transport machinery: entropy-regularized Sinkhorn, the
//! Gromov-Wasserstein linearization, the unified objective, and the
//! proximal-point solver over learnable costs.

mod fgw;
mod sinkhorn;

pub use fgw::{fgw_objective, gw_linearization, proximal_fgw, ProximalResult};
pub use sinkhorn::sinkhorn;

use ndarray::Array2;

use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// A soft node alignment: nonnegative matrix with prescribed marginals.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    values: Array2<f64>,
    /// Log of the plan entries when produced by an entropic solve; kept so
    /// downstream proximal steps never take log of an underflowed entry.
    log_values: Option<Array2<f64>>,
    mu1: Vec<f64>,
    mu2: Vec<f64>,
}

impl TransportPlan {
    pub fn new(values: Array2<f64>, mu1: Vec<f64>, mu2: Vec<f64>) -> Result<Self> {
        if values.nrows() != mu1.len() || values.ncols() != mu2.len() {
            return Err(Error::Shape(format!(
                "plan is {}x{} but marginals have lengths {} and {}",
                values.nrows(),
                values.ncols(),
                mu1.len(),
                mu2.len()
            )));
        }
        Ok(TransportPlan { values, log_values: None, mu1, mu2 })
    }

    pub(crate) fn with_logs(
        values: Array2<f64>,
        log_values: Array2<f64>,
        mu1: Vec<f64>,
        mu2: Vec<f64>,
    ) -> Self {
        TransportPlan { values, log_values: Some(log_values), mu1, mu2 }
    }

    /// The product coupling of uniform marginals; the standard warm start.
    pub fn uniform_product(n1: usize, n2: usize) -> Self {
        let v = 1.0 / (n1 as f64 * n2 as f64);
        let values = Array2::from_elem((n1, n2), v);
        let log_values = Array2::from_elem((n1, n2), v.ln());
        TransportPlan {
            values,
            log_values: Some(log_values),
            mu1: vec![1.0 / n1 as f64; n1],
            mu2: vec![1.0 / n2 as f64; n2],
        }
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn log_values(&self) -> Option<&Array2<f64>> {
        self.log_values.as_ref()
    }

    pub fn n1(&self) -> usize {
        self.values.nrows()
    }

    pub fn n2(&self) -> usize {
        self.values.ncols()
    }

    pub fn mu1(&self) -> &[f64] {
        &self.mu1
    }

    pub fn mu2(&self) -> &[f64] {
        &self.mu2
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.values.rows().into_iter().map(|r| r.sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n2()];
        for row in self.values.rows() {
            for (j, &v) in row.iter().enumerate() {
                sums[j] += v;
            }
        }
        sums
    }

    /// Max of the L1 row-marginal and L1 column-marginal errors.
    pub fn marginal_violation(&self) -> f64 {
        let row_err: f64 = self
            .row_sums()
            .iter()
            .zip(&self.mu1)
            .map(|(s, m)| (s - m).abs())
            .sum();
        let col_err: f64 = self
            .col_sums()
            .iter()
            .zip(&self.mu2)
            .map(|(s, m)| (s - m).abs())
            .sum();
        row_err.max(col_err)
    }
}

/// Transport costs built from embeddings: dense cross-network cost `m`,
/// sparse intra-network costs `c1`/`c2` supported on the edge sets.
#[derive(Debug, Clone)]
pub struct CostSet {
    pub m: Array2<f64>,
    pub c1: CsrMatrix,
    pub c2: CsrMatrix,
}

impl CostSet {
    pub fn validate_shapes(&self) -> Result<()> {
        if self.c1.nrows() != self.c1.ncols() || self.c2.nrows() != self.c2.ncols() {
            return Err(Error::Shape("intra-network costs must be square".into()));
        }
        if self.m.nrows() != self.c1.nrows() || self.m.ncols() != self.c2.nrows() {
            return Err(Error::Shape(format!(
                "cross cost is {}x{} but intra costs are {}x{} and {}x{}",
                self.m.nrows(),
                self.m.ncols(),
                self.c1.nrows(),
                self.c1.ncols(),
                self.c2.nrows(),
                self.c2.ncols()
            )));
        }
        Ok(())
    }
}

/// The scalar threshold turning the nonnegative plan into signed sampling
/// weights S_n = S - lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingShift {
    pub lambda: f64,
}

impl SamplingShift {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::Numeric(format!("sampling threshold must be finite, got {lambda}")));
        }
        Ok(SamplingShift { lambda })
    }

    /// Materialize S_n = S - lambda.
    pub fn apply(&self, plan: &TransportPlan) -> Array2<f64> {
        plan.values().mapv(|v| v - self.lambda)
    }
}
