//! The fused objective and its proximal-point solver.
//!
//! The unified objective over a plan S, threshold lambda and costs (M, C1,
//! C2), with S_n = S - lambda:
//!
//! ```text
//! J = (1 - alpha) * sum_{x,y} M(x,y) S_n(x,y)
//!   + alpha * sum_{x,x',y,y'} |C1(x,x') - C2(y,y')|^2 S_n(x,y) S_n(x',y')
//! ```
//!
//! The quadratic term never needs the quadruple loop: with r = S_n 1 and
//! c = S_n^T 1 it equals <L(S_n), S_n> where
//!
//! ```text
//! L(S_n) = (C1^2 r) 1^T + 1 (C2^2 c)^T - 2 C1 S_n C2^T
//! ```
//!
//! (entrywise squares; rank-one terms broadcast, never materialized as
//! n x n all-ones products). The minimization over S is non-convex, so each
//! outer step solves the linearized problem anchored at the current plan by
//! a KL proximal term, which reduces to entropy-regularized transport with
//! cost `(1-alpha) M + alpha L(S_n) - gamma_p log S` and regularizer
//! `gamma_p`, handled by log-domain Sinkhorn.

use ndarray::Array2;

use super::sinkhorn::{log_sinkhorn, LogSinkhornState};
use super::{CostSet, SamplingShift, TransportPlan};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Absolute slack allowed before a rising objective trace counts as
/// divergence, on top of the inexactness allowance from the subproblem
/// tolerance.
pub const OBJECTIVE_SLACK: f64 = 1e-8;

/// A subproblem solved to marginal violation `tol` can overshoot the exact
/// proximal descent by an amount proportional to `tol` (gradient scale
/// times plan perturbation), so the divergence gate widens accordingly.
pub fn divergence_slack(tol: f64, prev_objective: f64) -> f64 {
    OBJECTIVE_SLACK + tol * prev_objective.abs().max(1.0)
}

fn gw_linearization_cached(
    c1: &CsrMatrix,
    c1_sq: &CsrMatrix,
    c2: &CsrMatrix,
    c2_sq: &CsrMatrix,
    sn: &Array2<f64>,
) -> Array2<f64> {
    let (n1, n2) = (sn.nrows(), sn.ncols());
    let row_sums: Vec<f64> = sn.rows().into_iter().map(|r| r.sum()).collect();
    let mut col_sums = vec![0.0; n2];
    for row in sn.rows() {
        for (j, &v) in row.iter().enumerate() {
            col_sums[j] += v;
        }
    }
    let mut u = vec![0.0; n1];
    c1_sq.matvec(&row_sums, &mut u);
    let mut v = vec![0.0; n2];
    c2_sq.matvec(&col_sums, &mut v);

    // -2 * C1 S_n C2^T, built from two sparse-dense products
    let b = c1.matmul_dense(sn);
    let mut l = c2.dense_matmul_transpose(&b);
    for (i, mut row) in l.rows_mut().into_iter().enumerate() {
        let ui = u[i];
        for (j, val) in row.iter_mut().enumerate() {
            *val = ui + v[j] - 2.0 * *val;
        }
    }
    l
}

/// Linearization of the Gromov-Wasserstein term at `sn`:
/// `C1^2 sn 1 + 1 sn C2^2^T - 2 C1 sn C2^T` with entrywise squares.
pub fn gw_linearization(c1: &CsrMatrix, c2: &CsrMatrix, sn: &Array2<f64>) -> Result<Array2<f64>> {
    if c1.nrows() != c1.ncols() || c2.nrows() != c2.ncols() {
        return Err(Error::Shape("intra-network costs must be square".into()));
    }
    if sn.nrows() != c1.nrows() || sn.ncols() != c2.nrows() {
        return Err(Error::Shape(format!(
            "sampling matrix is {}x{}, expected {}x{}",
            sn.nrows(),
            sn.ncols(),
            c1.nrows(),
            c2.nrows()
        )));
    }
    let c1_sq = c1.map_values(|v| v * v);
    let c2_sq = c2.map_values(|v| v * v);
    Ok(gw_linearization_cached(c1, &c1_sq, c2, &c2_sq, sn))
}

fn dot(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x * y;
    }
    acc
}

fn objective_parts(costs: &CostSet, sn: &Array2<f64>, l_gw: &Array2<f64>, alpha: f64) -> f64 {
    (1.0 - alpha) * dot(&costs.m, sn) + alpha * dot(l_gw, sn)
}

/// Value of the unified objective at (S, lambda).
///
/// The quadratic term is evaluated through the linearization at S_n; the
/// quadruple loop exists only in test oracles.
pub fn fgw_objective(
    costs: &CostSet,
    plan: &TransportPlan,
    shift: SamplingShift,
    alpha: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha must be in [0, 1], got {alpha}")));
    }
    costs.validate_shapes()?;
    if plan.n1() != costs.m.nrows() || plan.n2() != costs.m.ncols() {
        return Err(Error::Shape(format!(
            "plan is {}x{} but cost is {}x{}",
            plan.n1(),
            plan.n2(),
            costs.m.nrows(),
            costs.m.ncols()
        )));
    }
    let sn = shift.apply(plan);
    let l_gw = gw_linearization(&costs.c1, &costs.c2, &sn)?;
    Ok(objective_parts(costs, &sn, &l_gw, alpha))
}

/// Result of a proximal solve: the final plan and the objective value at
/// every visited plan (length T + 1).
#[derive(Debug, Clone)]
pub struct ProximalResult {
    pub plan: TransportPlan,
    pub trace: Vec<f64>,
}

/// Proximal point method for the fused objective at fixed lambda and costs.
///
/// Runs `t_outer` iterations; each linearizes the quadratic term at the
/// current plan and solves the entropic subproblem with regularization
/// `gamma_p` by at most `n_sinkhorn` log-domain sweeps to marginal
/// tolerance `tol`. The constant bracket of the subproblem cost is dropped
/// during the solve (it cannot change the argmin) and the trace reports
/// the true objective instead.
///
/// Errors if a subproblem fails to converge or the objective rises by more
/// than [`OBJECTIVE_SLACK`].
#[allow(clippy::too_many_arguments)]
pub fn proximal_fgw(
    costs: &CostSet,
    shift: SamplingShift,
    alpha: f64,
    gamma_p: f64,
    warm_start: &TransportPlan,
    t_outer: usize,
    n_sinkhorn: usize,
    tol: f64,
) -> Result<ProximalResult> {
    if gamma_p <= 0.0 {
        return Err(Error::Config(format!("proximal weight must be positive, got {gamma_p}")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha must be in [0, 1], got {alpha}")));
    }
    costs.validate_shapes()?;
    let (n1, n2) = (costs.m.nrows(), costs.m.ncols());
    if warm_start.n1() != n1 || warm_start.n2() != n2 {
        return Err(Error::Shape(format!(
            "warm start is {}x{}, costs expect {n1}x{n2}",
            warm_start.n1(),
            warm_start.n2()
        )));
    }

    let c1_sq = costs.c1.map_values(|v| v * v);
    let c2_sq = costs.c2.map_values(|v| v * v);
    let mu1 = warm_start.mu1().to_vec();
    let mu2 = warm_start.mu2().to_vec();

    let mut values = warm_start.values().clone();
    let mut log_values = match warm_start.log_values() {
        Some(lv) => lv.clone(),
        None => {
            if values.iter().any(|&v| v <= 0.0) {
                return Err(Error::Numeric(
                    "warm start must be strictly positive (no log form available)".into(),
                ));
            }
            values.mapv(f64::ln)
        }
    };

    let mut state = LogSinkhornState::zeros(n1, n2);
    let mut trace = Vec::with_capacity(t_outer + 1);
    for _ in 0..t_outer {
        let sn = values.mapv(|v| v - shift.lambda);
        let l_gw = gw_linearization_cached(&costs.c1, &c1_sq, &costs.c2, &c2_sq, &sn);
        let objective = objective_parts(costs, &sn, &l_gw, alpha);
        if let Some(&prev) = trace.last() {
            if objective > prev + divergence_slack(tol, prev) {
                return Err(Error::Numeric(format!(
                    "proximal objective diverged: {prev:.12e} -> {objective:.12e}"
                )));
            }
        }
        trace.push(objective);

        // log kernel of the entropic subproblem:
        //   C_total = (1-alpha) M + alpha L - gamma_p log S
        //   Q = -C_total / gamma_p = log S - ((1-alpha) M + alpha L) / gamma_p
        let mut q = log_values;
        for i in 0..n1 {
            let mut qrow = q.row_mut(i);
            let qrow = qrow.as_slice_mut().expect("row-major");
            let mrow = costs.m.row(i);
            let mrow = mrow.as_slice().expect("row-major");
            let lrow = l_gw.row(i);
            let lrow = lrow.as_slice().expect("row-major");
            for j in 0..n2 {
                qrow[j] -= ((1.0 - alpha) * mrow[j] + alpha * lrow[j]) / gamma_p;
            }
        }
        let out = log_sinkhorn(&q, &mu1, &mu2, &mut state, n_sinkhorn, tol)?;
        values = out.plan;
        log_values = out.log_plan;
    }
    // objective at the final plan
    let sn = values.mapv(|v| v - shift.lambda);
    let l_gw = gw_linearization_cached(&costs.c1, &c1_sq, &costs.c2, &c2_sq, &sn);
    let objective = objective_parts(costs, &sn, &l_gw, alpha);
    if let Some(&prev) = trace.last() {
        if objective > prev + divergence_slack(tol, prev) {
            return Err(Error::Numeric(format!(
                "proximal objective diverged: {prev:.12e} -> {objective:.12e}"
            )));
        }
    }
    trace.push(objective);

    Ok(ProximalResult {
        plan: TransportPlan::with_logs(values, log_values, mu1, mu2),
        trace,
    })
}
