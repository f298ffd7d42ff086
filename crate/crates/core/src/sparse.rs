//! Minimal compressed-sparse-row matrices.
//!
//! Adjacency structures, walk matrices and intra-network cost matrices are
//! all sparse with the same access pattern: row slices and row-major
//! products against dense matrices. The products here are the O(nnz * n)
//! kernels behind the Gromov-Wasserstein linearization.

use ndarray::Array2;

use crate::{Error, Result};

/// Sparse f64 matrix in compressed-row form. Column indices within a row
/// are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets. Triplets are sorted; duplicate
    /// coordinates are rejected.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        for &(r, c, _) in &triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::Range(format!(
                    "triplet ({r}, {c}) outside {nrows}x{ncols} matrix"
                )));
            }
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        for w in triplets.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::Shape(format!(
                    "duplicate entry at ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        let mut indptr = vec![0usize; nrows + 1];
        for &(r, _, _) in &triplets {
            indptr[r + 1] += 1;
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        let indices = triplets.iter().map(|&(_, c, _)| c).collect();
        let values = triplets.iter().map(|&(_, _, v)| v).collect();
        Ok(CsrMatrix { nrows, ncols, indptr, indices, values })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.indptr[i + 1] - self.indptr[i]
    }

    /// Iterate all stored entries as (row, col, value) in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// Same sparsity pattern, new values (one per stored entry, row-major).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.nnz() {
            return Err(Error::Shape(format!(
                "expected {} values for pattern, got {}",
                self.nnz(),
                values.len()
            )));
        }
        Ok(CsrMatrix { values, ..self.clone() })
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        CsrMatrix {
            values: self.values.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn transpose(&self) -> Self {
        let triplets: Vec<_> = self.iter().map(|(r, c, v)| (c, r, v)).collect();
        CsrMatrix::from_triplets(self.ncols, self.nrows, triplets)
            .expect("transpose of a valid matrix is valid")
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && *self == self.transpose()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.nrows).map(|i| self.row(i).1.iter().sum()).collect()
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[i] = acc;
        }
    }

    /// Dense product A * D for dense D; O(nnz(A) * D.ncols()).
    pub fn matmul_dense(&self, d: &Array2<f64>) -> Array2<f64> {
        assert_eq!(d.nrows(), self.ncols);
        let mut out = Array2::zeros((self.nrows, d.ncols()));
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut out_row = out.row_mut(i);
            let out_slice = out_row.as_slice_mut().expect("row-major output");
            for (&c, &v) in cols.iter().zip(vals) {
                let d_row = d.row(c);
                let d_slice = d_row.as_slice().expect("row-major input");
                for (o, &x) in out_slice.iter_mut().zip(d_slice) {
                    *o += v * x;
                }
            }
        }
        out
    }

    /// Dense product D * A^T for dense D; O(nnz(A) * D.nrows()).
    pub fn dense_matmul_transpose(&self, d: &Array2<f64>) -> Array2<f64> {
        assert_eq!(d.ncols(), self.ncols);
        let mut out = Array2::zeros((d.nrows(), self.nrows));
        for i in 0..d.nrows() {
            let d_row = d.row(i);
            let d_slice = d_row.as_slice().expect("row-major input");
            let mut out_row = out.row_mut(i);
            let out_slice = out_row.as_slice_mut().expect("row-major output");
            for j in 0..self.nrows {
                let (cols, vals) = self.row(j);
                let mut acc = 0.0;
                for (&c, &v) in cols.iter().zip(vals) {
                    acc += v * d_slice[c];
                }
                out_slice[j] = acc;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.nrows, self.ncols));
        for (r, c, v) in self.iter() {
            out[[r, c]] = v;
        }
        out
    }
}
