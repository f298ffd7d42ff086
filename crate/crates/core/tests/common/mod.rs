//! Brute-force oracles shared by the integration and acceptance suites.
//!
//! Everything here evaluates the alignment objective by direct summation
//! (quadruple loops over node pairs), independent of the linearized fast
//! paths in the library. Only usable at toy sizes.

use ndarray::Array2;
use otalign::sparse::CsrMatrix;
use otalign::CostSet;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

/// Direct evaluation of the unified objective:
/// `(1-a) sum M.Sn + a sum |C1 - C2|^2 Sn Sn'` over all quadruples.
pub fn fgw_quadruple_loop(
    m: &Array2<f64>,
    c1: &Array2<f64>,
    c2: &Array2<f64>,
    sn: &Array2<f64>,
    alpha: f64,
) -> f64 {
    let (n1, n2) = sn.dim();
    let mut w_term = 0.0;
    for x in 0..n1 {
        for y in 0..n2 {
            w_term += m[[x, y]] * sn[[x, y]];
        }
    }
    let mut gw_term = 0.0;
    for x in 0..n1 {
        for xp in 0..n1 {
            for y in 0..n2 {
                for yp in 0..n2 {
                    let d = c1[[x, xp]] - c2[[y, yp]];
                    gw_term += d * d * sn[[x, y]] * sn[[xp, yp]];
                }
            }
        }
    }
    (1.0 - alpha) * w_term + alpha * gw_term
}

/// The three threshold-update reductions, by direct summation.
pub fn k123_quadruple_loop(
    m: &Array2<f64>,
    c1: &Array2<f64>,
    c2: &Array2<f64>,
    s: &Array2<f64>,
) -> (f64, f64, f64) {
    let k1 = m.iter().sum();
    let (n1, n2) = s.dim();
    let mut k2 = 0.0;
    let mut k3 = 0.0;
    for x in 0..n1 {
        for xp in 0..n1 {
            for y in 0..n2 {
                for yp in 0..n2 {
                    let d = c1[[x, xp]] - c2[[y, yp]];
                    let de = d * d;
                    k2 += de * (s[[x, y]] + s[[xp, yp]]);
                    k3 += de;
                }
            }
        }
    }
    (k1, k2, k3)
}

/// A random symmetric zero-diagonal sparse cost on a random non-empty
/// edge set.
pub fn random_intra_cost(rng: &mut ChaCha20Rng, n: usize) -> CsrMatrix {
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < 0.6 {
                let v: f64 = rng.random::<f64>() * 0.9 + 0.05;
                triplets.push((i, j, v));
                triplets.push((j, i, v));
            }
        }
    }
    if triplets.is_empty() {
        let v: f64 = rng.random::<f64>() * 0.9 + 0.05;
        triplets.push((0, 1, v));
        triplets.push((1, 0, v));
    }
    CsrMatrix::from_triplets(n, n, triplets).unwrap()
}

/// Random dense cross cost with entries in (0.05, 1.0).
pub fn random_cross_cost(rng: &mut ChaCha20Rng, n1: usize, n2: usize) -> Array2<f64> {
    Array2::from_shape_fn((n1, n2), |_| rng.random::<f64>() * 0.95 + 0.05)
}

pub fn random_costs(rng: &mut ChaCha20Rng, n1: usize, n2: usize) -> CostSet {
    CostSet {
        m: random_cross_cost(rng, n1, n2),
        c1: random_intra_cost(rng, n1),
        c2: random_intra_cost(rng, n2),
    }
}

/// Random plan-like nonnegative matrix normalized to unit mass.
pub fn random_unit_mass(rng: &mut ChaCha20Rng, n1: usize, n2: usize) -> Array2<f64> {
    let mut s = Array2::from_shape_fn((n1, n2), |_| rng.random::<f64>() + 1e-3);
    let total: f64 = s.iter().sum();
    s.mapv_inplace(|v| v / total);
    s
}
