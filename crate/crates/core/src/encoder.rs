//! The shared feature encoder and learnable transport costs.
//!
//! A two-layer perceptron with a residual connection around the second
//! layer maps per-node features to embeddings:
//!
//! ```text
//! h = relu(F W1 + b1)
//! E = h + relu(h W2 + b2)
//! ```
//!
//! Both graphs run through the same weights. Costs come from embedding
//! inner products, `M = exp(-E1 E2^T)` across networks and
//! `C_i = exp(-E_i E_i^T)` masked to the edge set within each network;
//! inner products are clamped to [-50, 50] before the exponential, and the
//! clamp participates in differentiation with zero gradient outside its
//! bounds. [`loss_and_grad`] evaluates the unified objective through this
//! chain at a fixed plan and threshold and backpropagates exactly by hand.

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::graph::Graph;
use crate::ot::{fgw_objective, CostSet, SamplingShift, TransportPlan};
use crate::rwr::FeatureMatrix;
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Clamp bound on embedding inner products before exponentiation.
pub const EXP_CLAMP: f64 = 50.0;

/// One value per weight tensor of the encoder; used both for the
/// parameters themselves and for gradients and optimizer moments.
#[derive(Debug, Clone)]
pub struct ParamTensors {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
}

impl ParamTensors {
    pub fn zeros(in_dim: usize, hidden: usize, out: usize) -> Self {
        ParamTensors {
            w1: Array2::zeros((in_dim, hidden)),
            b1: Array1::zeros(hidden),
            w2: Array2::zeros((hidden, out)),
            b2: Array1::zeros(out),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.w1.iter().chain(self.b1.iter()).chain(self.w2.iter()).chain(self.b2.iter())
    }
}

/// Gradients shaped like the encoder parameters.
pub type Gradients = ParamTensors;

/// Encoder weights plus Adam optimizer state.
#[derive(Debug, Clone)]
pub struct EncoderParams {
    weights: ParamTensors,
    adam_m: ParamTensors,
    adam_v: ParamTensors,
    step: u64,
}

impl EncoderParams {
    pub fn weights(&self) -> &ParamTensors {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut ParamTensors {
        &mut self.weights
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn in_dim(&self) -> usize {
        self.weights.w1.nrows()
    }

    pub fn hidden_dim(&self) -> usize {
        self.weights.w1.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.w2.ncols()
    }

    pub fn from_raw(
        weights: ParamTensors,
        adam_m: ParamTensors,
        adam_v: ParamTensors,
        step: u64,
    ) -> Self {
        EncoderParams { weights, adam_m, adam_v, step }
    }

    pub fn raw(&self) -> (&ParamTensors, &ParamTensors, &ParamTensors, u64) {
        (&self.weights, &self.adam_m, &self.adam_v, self.step)
    }
}

/// Node embeddings of the two graphs under the shared encoder.
#[derive(Debug, Clone)]
pub struct EmbeddingPair {
    pub e1: Array2<f64>,
    pub e2: Array2<f64>,
}

/// Initialize encoder weights from a zero-mean uniform distribution with
/// scale 1/sqrt(fan_in); biases and moments start at zero.
pub fn init_encoder(in_dim: usize, hidden: usize, out: usize, seed: u64) -> Result<EncoderParams> {
    if in_dim == 0 {
        return Err(Error::Config("encoder input dimension must be at least 1".into()));
    }
    if hidden != out {
        return Err(Error::Config(format!(
            "residual connection needs hidden == out, got {hidden} and {out}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut weights = ParamTensors::zeros(in_dim, hidden, out);
    let s1 = 1.0 / (in_dim as f64).sqrt();
    for v in weights.w1.iter_mut() {
        *v = (rng.random::<f64>() * 2.0 - 1.0) * s1;
    }
    let s2 = 1.0 / (hidden as f64).sqrt();
    for v in weights.w2.iter_mut() {
        *v = (rng.random::<f64>() * 2.0 - 1.0) * s2;
    }
    let adam_m = ParamTensors::zeros(in_dim, hidden, out);
    let adam_v = ParamTensors::zeros(in_dim, hidden, out);
    Ok(EncoderParams { weights, adam_m, adam_v, step: 0 })
}

struct ForwardCache {
    /// Hidden activations relu(F W1 + b1).
    h: Array2<f64>,
    /// Indicator of positive first-layer pre-activations.
    mask1: Array2<f64>,
    /// Indicator of positive second-layer pre-activations.
    mask2: Array2<f64>,
    e: Array2<f64>,
}

fn forward(params: &EncoderParams, features: &Array2<f64>) -> Result<ForwardCache> {
    if features.ncols() != params.in_dim() {
        return Err(Error::Shape(format!(
            "feature width {} does not match encoder input {}",
            features.ncols(),
            params.in_dim()
        )));
    }
    let w = &params.weights;
    let mut z1 = features.dot(&w.w1);
    z1 += &w.b1;
    let mask1 = z1.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
    let h = z1.mapv(|v| v.max(0.0));
    let mut z2 = h.dot(&w.w2);
    z2 += &w.b2;
    let mask2 = z2.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
    let e = &h + &z2.mapv(|v| v.max(0.0));
    Ok(ForwardCache { h, mask1, mask2, e })
}

/// Forward pass: embed every node of a feature matrix.
pub fn encode(params: &EncoderParams, features: &FeatureMatrix) -> Result<Array2<f64>> {
    Ok(forward(params, features.values())?.e)
}

/// Embed both graphs through the shared encoder.
pub fn encode_pair(
    params: &EncoderParams,
    f1: &FeatureMatrix,
    f2: &FeatureMatrix,
) -> Result<EmbeddingPair> {
    Ok(EmbeddingPair { e1: encode(params, f1)?, e2: encode(params, f2)? })
}

fn clamped_exp_neg(z: f64) -> (f64, f64) {
    // value and indicator that the clamp is inactive
    if z > EXP_CLAMP {
        ((-EXP_CLAMP).exp(), 0.0)
    } else if z < -EXP_CLAMP {
        (EXP_CLAMP.exp(), 0.0)
    } else {
        ((-z).exp(), 1.0)
    }
}

fn edge_cost_values(e: &Array2<f64>, adjacency: &CsrMatrix) -> (Vec<f64>, Vec<f64>) {
    let mut values = Vec::with_capacity(adjacency.nnz());
    let mut masks = Vec::with_capacity(adjacency.nnz());
    for (a, b, _) in adjacency.iter() {
        let z = e.row(a).dot(&e.row(b));
        let (v, m) = clamped_exp_neg(z);
        values.push(v);
        masks.push(m);
    }
    (values, masks)
}

/// Build the transport costs from embeddings: dense cross-network cost and
/// sparse intra-network costs supported exactly on the edge sets.
pub fn cost_matrices(emb: &EmbeddingPair, g1: &Graph, g2: &Graph) -> Result<CostSet> {
    if emb.e1.ncols() != emb.e2.ncols() {
        return Err(Error::Shape(format!(
            "embedding widths differ: {} vs {}",
            emb.e1.ncols(),
            emb.e2.ncols()
        )));
    }
    if emb.e1.nrows() != g1.n() || emb.e2.nrows() != g2.n() {
        return Err(Error::Shape("embedding row counts do not match the graphs".into()));
    }
    let z = emb.e1.dot(&emb.e2.t());
    let m = z.mapv(|v| clamped_exp_neg(v).0);
    let (v1, _) = edge_cost_values(&emb.e1, g1.adjacency());
    let (v2, _) = edge_cost_values(&emb.e2, g2.adjacency());
    Ok(CostSet {
        m,
        c1: g1.adjacency().with_values(v1)?,
        c2: g2.adjacency().with_values(v2)?,
    })
}

fn backward_encoder(
    params: &EncoderParams,
    features: &Array2<f64>,
    cache: &ForwardCache,
    d_e: &Array2<f64>,
    grads: &mut Gradients,
) {
    let w = &params.weights;
    let dz2 = d_e * &cache.mask2;
    grads.w2 += &cache.h.t().dot(&dz2);
    grads.b2 += &dz2.sum_axis(Axis(0));
    let dh = d_e + &dz2.dot(&w.w2.t());
    let dz1 = &dh * &cache.mask1;
    grads.w1 += &features.t().dot(&dz1);
    grads.b1 += &dz1.sum_axis(Axis(0));
}

/// Evaluate the unified objective through encode -> costs at a fixed plan
/// and threshold, returning the loss and its exact gradient with respect
/// to every encoder weight and bias.
#[allow(clippy::too_many_arguments)]
pub fn loss_and_grad(
    params: &EncoderParams,
    f1: &FeatureMatrix,
    f2: &FeatureMatrix,
    g1: &Graph,
    g2: &Graph,
    plan: &TransportPlan,
    shift: SamplingShift,
    alpha: f64,
) -> Result<(f64, Gradients)> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha must be in [0, 1], got {alpha}")));
    }
    let cache1 = forward(params, f1.values())?;
    let cache2 = forward(params, f2.values())?;
    let (e1, e2) = (&cache1.e, &cache2.e);

    let z = e1.dot(&e2.t());
    let m = z.mapv(|v| clamped_exp_neg(v).0);
    let mask_m = z.mapv(|v| clamped_exp_neg(v).1);
    let (v1, mask1) = edge_cost_values(e1, g1.adjacency());
    let (v2, mask2) = edge_cost_values(e2, g2.adjacency());
    let costs = CostSet {
        m,
        c1: g1.adjacency().with_values(v1)?,
        c2: g2.adjacency().with_values(v2)?,
    };

    let loss = fgw_objective(&costs, plan, shift, alpha)?;
    if !loss.is_finite() {
        return Err(Error::Numeric(format!("objective is not finite: {loss}")));
    }

    let sn = shift.apply(plan);
    let n2 = sn.ncols();
    let r: Vec<f64> = sn.rows().into_iter().map(|row| row.sum()).collect();
    let mut c = vec![0.0; n2];
    for row in sn.rows() {
        for (j, &v) in row.iter().enumerate() {
            c[j] += v;
        }
    }

    // cross-network part: dJ/dZ = (1-alpha) * S_n * dM/dZ, dM/dZ = -M inside the clamp
    let gz = {
        let mut gz = sn.clone();
        gz.zip_mut_with(&costs.m, |g, &mv| *g *= -mv);
        gz.zip_mut_with(&mask_m, |g, &msk| *g *= msk);
        gz *= 1.0 - alpha;
        gz
    };
    let mut d_e1 = gz.dot(e2);
    let mut d_e2 = gz.t().dot(e1);

    // intra-network parts; for each stored directed edge (a, b):
    //   dJ/dC1(a,b) = alpha * (2 C1(a,b) r(a) r(b) - 2 [S_n C2^T S_n^T](a,b))
    // chained through C1(a,b) = exp(-clamp(<E1(a), E1(b)>)).
    let d2 = costs.c2.dense_matmul_transpose(&sn); // S_n C2^T, n1 x n2
    for (idx, (a, b, cv)) in costs.c1.iter().enumerate() {
        let quad = d2.row(a).dot(&sn.row(b));
        let g_c = alpha * (2.0 * cv * r[a] * r[b] - 2.0 * quad);
        let w = g_c * (-cv) * mask1[idx];
        if w != 0.0 {
            let (row_b, row_a) = (e1.row(b).to_owned(), e1.row(a).to_owned());
            d_e1.row_mut(a).scaled_add(w, &row_b);
            d_e1.row_mut(b).scaled_add(w, &row_a);
        }
    }
    // same for C2 with column sums: dJ/dC2(u,v) uses [S_n^T C1 S_n](u,v)
    let b_mat = costs.c1.matmul_dense(&sn); // C1 S_n, n1 x n2
    let sn_t = sn.t().to_owned();
    let b_t = b_mat.t().to_owned();
    for (idx, (u, v, cv)) in costs.c2.iter().enumerate() {
        let quad = sn_t.row(u).dot(&b_t.row(v));
        let g_c = alpha * (2.0 * cv * c[u] * c[v] - 2.0 * quad);
        let w = g_c * (-cv) * mask2[idx];
        if w != 0.0 {
            let (row_v, row_u) = (e2.row(v).to_owned(), e2.row(u).to_owned());
            d_e2.row_mut(u).scaled_add(w, &row_v);
            d_e2.row_mut(v).scaled_add(w, &row_u);
        }
    }

    let mut grads = ParamTensors::zeros(params.in_dim(), params.hidden_dim(), params.out_dim());
    backward_encoder(params, f1.values(), &cache1, &d_e1, &mut grads);
    backward_encoder(params, f2.values(), &cache2, &d_e2, &mut grads);
    Ok((loss, grads))
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

fn adam_update(
    p: &mut [f64],
    g: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    lr: f64,
    bc1: f64,
    bc2: f64,
) {
    for i in 0..p.len() {
        m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * g[i];
        v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * g[i] * g[i];
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        p[i] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
    }
}

/// One Adam step (beta1 = 0.9, beta2 = 0.999, eps = 1e-8) with bias
/// correction; increments the step counter and updates the moment buffers.
pub fn adam_step(params: &mut EncoderParams, grads: &Gradients, lr: f64) -> Result<()> {
    if grads.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("gradient contains non-finite entries".into()));
    }
    params.step += 1;
    let t = params.step as i32;
    let bc1 = 1.0 - ADAM_BETA1.powi(t);
    let bc2 = 1.0 - ADAM_BETA2.powi(t);
    let w = &mut params.weights;
    let m = &mut params.adam_m;
    let v = &mut params.adam_v;
    adam_update(
        w.w1.as_slice_mut().unwrap(),
        grads.w1.as_slice().unwrap(),
        m.w1.as_slice_mut().unwrap(),
        v.w1.as_slice_mut().unwrap(),
        lr,
        bc1,
        bc2,
    );
    adam_update(
        w.b1.as_slice_mut().unwrap(),
        grads.b1.as_slice().unwrap(),
        m.b1.as_slice_mut().unwrap(),
        v.b1.as_slice_mut().unwrap(),
        lr,
        bc1,
        bc2,
    );
    adam_update(
        w.w2.as_slice_mut().unwrap(),
        grads.w2.as_slice().unwrap(),
        m.w2.as_slice_mut().unwrap(),
        v.w2.as_slice_mut().unwrap(),
        lr,
        bc1,
        bc2,
    );
    adam_update(
        w.b2.as_slice_mut().unwrap(),
        grads.b2.as_slice().unwrap(),
        m.b2.as_slice_mut().unwrap(),
        v.b2.as_slice_mut().unwrap(),
        lr,
        bc1,
        bc2,
    );
    Ok(())
}

/// Mean Euclidean distance over all unordered pairs of embedding rows,
/// pooling both graphs; the collapse diagnostic.
pub fn mean_pairwise_distance(emb: &EmbeddingPair) -> f64 {
    let n1 = emb.e1.nrows();
    let n = n1 + emb.e2.nrows();
    if n < 2 {
        return 0.0;
    }
    let row = |i: usize| if i < n1 { emb.e1.row(i) } else { emb.e2.row(i - n1) };
    let mut acc = 0.0;
    for i in 0..n {
        let ri = row(i);
        for j in (i + 1)..n {
            let rj = row(j);
            let mut d = 0.0;
            for (a, b) in ri.iter().zip(rj.iter()) {
                let diff = a - b;
                d += diff * diff;
            }
            acc += d.sqrt();
        }
    }
    acc / (n * (n - 1) / 2) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{AnchorRole, AnchorSet};
    use crate::rwr::build_features;
    use ndarray::array;

    fn features_from(values: Array2<f64>) -> FeatureMatrix {
        FeatureMatrix::from_raw(values, 0)
    }

    #[test]
    fn init_shapes_and_determinism() {
        let p = init_encoder(5, 128, 128, 3).unwrap();
        assert_eq!(p.weights().w1.dim(), (5, 128));
        assert_eq!(p.weights().w2.dim(), (128, 128));
        assert!(p.weights().b1.iter().all(|&v| v == 0.0));
        assert!(p.weights().b2.iter().all(|&v| v == 0.0));
        let q = init_encoder(5, 128, 128, 3).unwrap();
        assert_eq!(p.weights().w1, q.weights().w1);
        let r = init_encoder(5, 128, 128, 4).unwrap();
        assert_ne!(p.weights().w1, r.weights().w1);
        // scale bound 1/sqrt(5)
        let bound = 1.0 / 5.0f64.sqrt();
        assert!(p.weights().w1.iter().all(|v| v.abs() <= bound));
    }

    #[test]
    fn mismatched_hidden_out_rejected() {
        assert!(init_encoder(4, 16, 8, 0).is_err());
    }

    #[test]
    fn zero_params_map_everything_to_zero() {
        let mut p = init_encoder(3, 4, 4, 0).unwrap();
        p.weights_mut().w1.fill(0.0);
        p.weights_mut().w2.fill(0.0);
        let f = features_from(array![[1.0, -2.0, 0.5], [0.0, 3.0, 1.0]]);
        let e = encode(&p, &f).unwrap();
        assert!(e.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_input_with_zero_biases_maps_to_zero() {
        let p = init_encoder(3, 4, 4, 1).unwrap();
        let f = features_from(Array2::zeros((2, 3)));
        let e = encode(&p, &f).unwrap();
        assert!(e.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn scalar_forward_matches_hand_computation() {
        // in_dim = hidden = out = 1: h = relu(x*w1 + b1), e = h + relu(h*w2 + b2)
        let mut p = init_encoder(1, 1, 1, 0).unwrap();
        p.weights_mut().w1[[0, 0]] = 2.0;
        p.weights_mut().b1[0] = -1.0;
        p.weights_mut().w2[[0, 0]] = 3.0;
        p.weights_mut().b2[0] = 0.5;
        let f = features_from(array![[2.0]]);
        let e = encode(&p, &f).unwrap();
        let h = (2.0f64 * 2.0 - 1.0).max(0.0); // 3
        let expect = h + (h * 3.0 + 0.5).max(0.0); // 3 + 9.5
        assert_eq!(e[[0, 0]], expect);
    }

    #[test]
    fn encode_is_permutation_equivariant() {
        let p = init_encoder(3, 8, 8, 5).unwrap();
        let f = array![[1.0, 0.2, -0.3], [0.4, -1.0, 2.0], [0.0, 0.7, 0.1]];
        let e = encode(&p, &features_from(f.clone())).unwrap();
        let perm = [2usize, 0, 1];
        let mut fp = Array2::zeros((3, 3));
        for (i, &pi) in perm.iter().enumerate() {
            fp.row_mut(i).assign(&f.row(pi));
        }
        let ep = encode(&p, &features_from(fp)).unwrap();
        for (i, &pi) in perm.iter().enumerate() {
            assert_eq!(ep.row(i), e.row(pi));
        }
    }

    #[test]
    fn zero_embeddings_give_unit_costs_on_edges() {
        let g = Graph::new(3, &[(0, 1), (1, 2)], None).unwrap();
        let emb = EmbeddingPair { e1: Array2::zeros((3, 4)), e2: Array2::zeros((3, 4)) };
        let costs = cost_matrices(&emb, &g, &g).unwrap();
        assert!(costs.m.iter().all(|&v| v == 1.0));
        assert_eq!(costs.c1.nnz(), 4);
        assert!(costs.c1.values().iter().all(|&v| v == 1.0));
        // non-edge entries are structurally zero
        assert_eq!(costs.c1.to_dense()[[0, 2]], 0.0);
    }

    #[test]
    fn unit_inner_product_gives_exp_minus_one() {
        let g = Graph::new(2, &[(0, 1)], None).unwrap();
        let e1 = array![[1.0, 0.0], [0.0, 1.0]];
        let emb = EmbeddingPair { e1: e1.clone(), e2: e1 };
        let costs = cost_matrices(&emb, &g, &g).unwrap();
        assert!((costs.m[[0, 0]] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((costs.m[[0, 1]] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clamp_bounds_cost_range() {
        let g = Graph::new(2, &[(0, 1)], None).unwrap();
        let e1 = array![[100.0, 0.0], [0.0, -100.0]];
        let emb = EmbeddingPair { e1: e1.clone(), e2: e1 };
        let costs = cost_matrices(&emb, &g, &g).unwrap();
        let hi = EXP_CLAMP.exp();
        let lo = (-EXP_CLAMP).exp();
        assert!(costs.m.iter().all(|&v| (lo..=hi).contains(&v)));
    }

    #[test]
    fn zero_weight_loss_is_plan_mass_with_all_ones_cost() {
        let g = Graph::new(2, &[(0, 1)], None).unwrap();
        let mut p = init_encoder(1, 3, 3, 0).unwrap();
        p.weights_mut().w1.fill(0.0);
        p.weights_mut().w2.fill(0.0);
        let anchors = AnchorSet::new(vec![(0, 0)], AnchorRole::Train).unwrap();
        let (f1, f2) = build_features(&g, &g, &anchors, 0.5, 1e-10, 1000).unwrap();
        let plan = TransportPlan::uniform_product(2, 2);
        let (loss, grads) = loss_and_grad(
            &p,
            &f1,
            &f2,
            &g,
            &g,
            &plan,
            SamplingShift::new(0.0).unwrap(),
            0.0,
        )
        .unwrap();
        assert!((loss - 1.0).abs() < 1e-12);
        assert!(grads.b2.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn adam_first_step_is_signed_learning_rate() {
        let mut p = init_encoder(1, 1, 1, 0).unwrap();
        p.weights_mut().w1[[0, 0]] = 0.7;
        let mut grads = ParamTensors::zeros(1, 1, 1);
        grads.w1[[0, 0]] = 0.3;
        adam_step(&mut p, &grads, 1e-2).unwrap();
        // bias-corrected first step: m_hat = g, v_hat = g^2
        let expect = 0.7 - 1e-2 * 0.3 / (0.3f64 + ADAM_EPS);
        assert!((p.weights().w1[[0, 0]] - expect).abs() < 1e-15);
        assert_eq!(p.step(), 1);
    }

    #[test]
    fn adam_zero_gradient_keeps_fresh_params() {
        let mut p = init_encoder(2, 2, 2, 1).unwrap();
        let before = p.weights().clone();
        let grads = ParamTensors::zeros(2, 2, 2);
        adam_step(&mut p, &grads, 1e-3).unwrap();
        assert_eq!(p.weights().w1, before.w1);
        assert_eq!(p.weights().w2, before.w2);
    }

    #[test]
    fn gradient_matches_finite_differences_on_tiny_instance() {
        let g1 = Graph::new(3, &[(0, 1), (1, 2)], None).unwrap();
        let g2 = Graph::new(3, &[(0, 1), (0, 2)], None).unwrap();
        let anchors = AnchorSet::new(vec![(0, 0), (2, 2)], AnchorRole::Train).unwrap();
        let (f1, f2) = build_features(&g1, &g2, &anchors, 0.2, 1e-12, 10_000).unwrap();
        let params = init_encoder(f1.width(), 4, 4, 11).unwrap();
        let plan = TransportPlan::uniform_product(3, 3);
        let shift = SamplingShift::new(0.05).unwrap();
        let alpha = 0.6;
        let (_, grads) =
            loss_and_grad(&params, &f1, &f2, &g1, &g2, &plan, shift, alpha).unwrap();

        let eval = |p: &EncoderParams| {
            loss_and_grad(p, &f1, &f2, &g1, &g2, &plan, shift, alpha).unwrap().0
        };
        let h = 1e-6;
        for (r, c) in [(0usize, 0usize), (1, 2), (1, 3)] {
            let mut plus = params.clone();
            plus.weights_mut().w1[[r, c]] += h;
            let mut minus = params.clone();
            minus.weights_mut().w1[[r, c]] -= h;
            let fd = (eval(&plus) - eval(&minus)) / (2.0 * h);
            let an = grads.w1[[r, c]];
            assert!(
                (fd - an).abs() <= 1e-6 * an.abs().max(fd.abs()).max(1e-3),
                "w1[{r},{c}]: analytic {an} vs fd {fd}"
            );
        }
    }

    #[test]
    fn mean_pairwise_distance_zero_for_identical_rows() {
        let e = Array2::from_elem((4, 3), 2.5);
        let emb = EmbeddingPair { e1: e.clone(), e2: e };
        assert_eq!(mean_pairwise_distance(&emb), 0.0);
    }
}
