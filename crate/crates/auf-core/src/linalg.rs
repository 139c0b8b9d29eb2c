//! Minimal dense linear algebra: a row-major matrix and an LLT (Cholesky)
//! factorization for symmetric positive-definite solves.
//!
//! The problem sizes here top out around 1600x1600, so a straightforward
//! triple-loop factorization is entirely adequate and keeps the crate free of
//! platform linear-algebra dependencies.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Mat {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n_rows: usize, n_cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                data.push(f(i, j));
            }
        }
        Mat {
            n_rows,
            n_cols,
            data,
        }
    }

    /// Build from a flat row-major buffer. `data.len()` must equal rows*cols.
    pub fn from_vec(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n_rows * n_cols, "buffer shape mismatch");
        Mat {
            n_rows,
            n_cols,
            data,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat {
            n_rows,
            n_cols,
            data,
        }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n_cols, "matvec shape mismatch");
        let mut out = Vec::with_capacity(self.n_rows);
        for i in 0..self.n_rows {
            let row = self.row(i);
            let mut s = 0.0;
            for (a, b) in row.iter().zip(v.iter()) {
                s += a * b;
            }
            out.push(s);
        }
        out
    }

    /// New matrix keeping the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        Mat::from_fn(self.n_rows, cols.len(), |i, j| self.get(i, cols[j]))
    }

    pub fn trace(&self) -> f64 {
        debug_assert!(self.is_square());
        (0..self.n_rows).map(|i| self.get(i, i)).sum()
    }

    /// Maximum |a_ij - a_ji| over all pairs; 0 for exactly symmetric input.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n_rows {
            for j in (i + 1)..self.n_cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    /// Row-major lower triangle (full storage; upper part unused).
    l: Vec<f64>,
}

impl Cholesky {
    /// Factor `a = L Lᵀ`. Fails with [`Error::IllConditioned`] when a pivot is
    /// not strictly positive (matrix not numerically positive definite).
    pub fn factor(a: &Mat) -> Result<Self> {
        assert!(a.is_square(), "Cholesky requires a square matrix");
        let n = a.n_rows();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(Error::IllConditioned);
                    }
                    l[i * n + i] = libm::sqrt(s);
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Cholesky { dim: n, l })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Solve `A x = b` using the stored factor.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.dim, "rhs length mismatch");
        let n = self.dim;
        // Forward substitution L y = b.
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        // Back substitution Lᵀ x = y.
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }

    /// Column-wise solve for a matrix right-hand side.
    pub fn solve_mat(&self, b: &Mat) -> Mat {
        assert_eq!(b.n_rows(), self.dim, "rhs rows mismatch");
        let mut out = Mat::zeros(b.n_rows(), b.n_cols());
        for j in 0..b.n_cols() {
            let col = self.solve(&b.column(j));
            for (i, v) in col.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_small_system() {
        // A = [[4,12],[12,37]] has L = [[2,0],[6,1]].
        let a = Mat::from_rows(&[vec![4.0, 12.0], vec![12.0, 37.0]]);
        let ch = Cholesky::factor(&a).unwrap();
        let x = ch.solve(&[16.0, 43.0]);
        // Check residual A x = b.
        let r = a.matvec(&x);
        assert!((r[0] - 16.0).abs() < 1e-12);
        assert!((r[1] - 43.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert_eq!(Cholesky::factor(&a).unwrap_err(), Error::IllConditioned);
    }

    #[test]
    fn select_columns_reorders() {
        let m = Mat::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        let s = m.select_columns(&[2, 0]);
        assert_eq!(s.row(0), &[3.0, 1.0]);
        assert_eq!(s.row(1), &[6.0, 4.0]);
    }
}
