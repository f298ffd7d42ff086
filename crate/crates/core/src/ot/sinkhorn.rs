//! Log-domain Sinkhorn iterations.
//!
//! Solves min <C, S> + reg * <log S, S> over the coupling polytope by
//! alternating potential updates on the log kernel Q = -C / reg:
//!
//! ```text
//! u_i = log mu1_i - logsumexp_j(Q_ij + v_j)
//! v_j = log mu2_j - logsumexp_i(Q_ij + u_i)
//! S   = exp(u_i + v_j + Q_ij)
//! ```
//!
//! Everything stays in log space; the regularizer can be as small as 5e-4
//! against O(1) costs without underflow. Convergence is declared when the
//! max of the L1 row- and column-marginal errors drops below `tol`. The
//! column update runs last, so the returned plan's total mass matches the
//! marginals to roundoff.

use ndarray::Array2;

use super::TransportPlan;
use crate::{Error, Result};

pub(crate) struct LogSinkhornState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl LogSinkhornState {
    pub fn zeros(n1: usize, n2: usize) -> Self {
        LogSinkhornState { u: vec![0.0; n1], v: vec![0.0; n2] }
    }
}

pub(crate) struct LogSinkhornOutput {
    pub plan: Array2<f64>,
    pub log_plan: Array2<f64>,
}

/// Run sweeps on the log kernel until the marginal violation falls below
/// `tol`. The potentials in `state` are used as the starting point and left
/// at their final values for warm-starting the next call.
pub(crate) fn log_sinkhorn(
    q: &Array2<f64>,
    mu1: &[f64],
    mu2: &[f64],
    state: &mut LogSinkhornState,
    max_iter: usize,
    tol: f64,
) -> Result<LogSinkhornOutput> {
    let (n1, n2) = (q.nrows(), q.ncols());
    let log_mu1: Vec<f64> = mu1.iter().map(|&m| m.ln()).collect();
    let log_mu2: Vec<f64> = mu2.iter().map(|&m| m.ln()).collect();
    let u = &mut state.u;
    let v = &mut state.v;

    let mut plan = Array2::zeros((n1, n2));
    let mut violation = f64::INFINITY;
    for _sweep in 1..=max_iter {
        // row update: u_i = log mu1_i - LSE_j(Q_ij + v_j)
        for i in 0..n1 {
            let row = q.row(i);
            let row = row.as_slice().expect("row-major");
            let mut hi = f64::NEG_INFINITY;
            for (j, &qv) in row.iter().enumerate() {
                let z = qv + v[j];
                if z > hi {
                    hi = z;
                }
            }
            let mut acc = 0.0;
            for (j, &qv) in row.iter().enumerate() {
                acc += (qv + v[j] - hi).exp();
            }
            u[i] = log_mu1[i] - (hi + acc.ln());
        }
        // column update, row-major two-pass: per-column max, then sum
        let mut col_hi = vec![f64::NEG_INFINITY; n2];
        for i in 0..n1 {
            let row = q.row(i);
            let row = row.as_slice().expect("row-major");
            let ui = u[i];
            for (j, &qv) in row.iter().enumerate() {
                let z = qv + ui;
                if z > col_hi[j] {
                    col_hi[j] = z;
                }
            }
        }
        let mut col_acc = vec![0.0; n2];
        for i in 0..n1 {
            let row = q.row(i);
            let row = row.as_slice().expect("row-major");
            let ui = u[i];
            for (j, &qv) in row.iter().enumerate() {
                col_acc[j] += (qv + ui - col_hi[j]).exp();
            }
        }
        for j in 0..n2 {
            v[j] = log_mu2[j] - (col_hi[j] + col_acc[j].ln());
        }
        // materialize the plan and measure both marginal errors
        let mut row_err = 0.0;
        let mut col_sums = vec![0.0; n2];
        for i in 0..n1 {
            let qrow = q.row(i);
            let qrow = qrow.as_slice().expect("row-major");
            let mut prow = plan.row_mut(i);
            let prow = prow.as_slice_mut().expect("row-major");
            let ui = u[i];
            let mut rs = 0.0;
            for (j, &qv) in qrow.iter().enumerate() {
                let s = (ui + v[j] + qv).exp();
                prow[j] = s;
                rs += s;
                col_sums[j] += s;
            }
            row_err += (rs - mu1[i]).abs();
        }
        let col_err: f64 = col_sums.iter().zip(mu2).map(|(s, m)| (s - m).abs()).sum();
        violation = row_err.max(col_err);
        if violation <= tol {
            let log_plan = log_plan_from(q, u, v);
            return Ok(LogSinkhornOutput { plan, log_plan });
        }
    }
    Err(Error::NonConvergence {
        what: "Sinkhorn iterations",
        iterations: max_iter,
        residual: violation,
    })
}

fn log_plan_from(q: &Array2<f64>, u: &[f64], v: &[f64]) -> Array2<f64> {
    let mut log_plan = q.clone();
    for (i, mut row) in log_plan.rows_mut().into_iter().enumerate() {
        let ui = u[i];
        for (j, val) in row.iter_mut().enumerate() {
            *val += ui + v[j];
        }
    }
    log_plan
}

/// Entropy-regularized optimal transport.
///
/// Minimizes `<cost, S> + reg * <log S, S>` over plans with marginals
/// `mu1`, `mu2`, to within `tol` on the marginal violation.
pub fn sinkhorn(
    cost: &Array2<f64>,
    mu1: &[f64],
    mu2: &[f64],
    reg: f64,
    max_iter: usize,
    tol: f64,
) -> Result<TransportPlan> {
    if reg <= 0.0 {
        return Err(Error::Config(format!("entropy regularization must be positive, got {reg}")));
    }
    if cost.nrows() != mu1.len() || cost.ncols() != mu2.len() {
        return Err(Error::Shape(format!(
            "cost is {}x{} but marginals have lengths {} and {}",
            cost.nrows(),
            cost.ncols(),
            mu1.len(),
            mu2.len()
        )));
    }
    if cost.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("cost matrix contains non-finite entries".into()));
    }
    for (name, mu) in [("row", mu1), ("column", mu2)] {
        if mu.iter().any(|&m| m <= 0.0) {
            return Err(Error::Config(format!("{name} marginals must be strictly positive")));
        }
        let sum: f64 = mu.iter().sum();
        if (sum - 1.0).abs() > 1e-8 {
            return Err(Error::Config(format!("{name} marginals sum to {sum}, expected 1")));
        }
    }
    let q = cost.mapv(|c| -c / reg);
    let mut state = LogSinkhornState::zeros(mu1.len(), mu2.len());
    let out = log_sinkhorn(&q, mu1, mu2, &mut state, max_iter, tol)?;
    Ok(TransportPlan::with_logs(out.plan, out.log_plan, mu1.to_vec(), mu2.to_vec()))
}
