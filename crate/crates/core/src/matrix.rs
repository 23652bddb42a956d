//! Dense real matrices.
//!
//! Storage is row-major. Everything else in the crate talks to matrices through
//! `(i, j)` indexing plus a handful of in-place row/column kernels used by the
//! elementary transformations.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let m = Self { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(n_rows, n_cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Dimension of a square matrix, or `NotSquare`.
    pub fn square_dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|x| !x.is_finite()) {
            Some(k) => Err(Error::NonFinite {
                row: k / self.cols.max(1),
                col: k % self.cols.max(1),
            }),
            None => Ok(()),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self^T * A * self`, the similarity used throughout.
    pub fn congruence(&self, a: &DenseMatrix) -> Result<Self> {
        self.transpose().matmul(&a.matmul(self)?)
    }

    fn zip_with(&self, rhs: &DenseMatrix, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, rhs: &DenseMatrix) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `self + s*I`.
    pub fn shift_diagonal(&self, s: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out[(i, i)] += s;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let m = self.to_nalgebra();
        m.singular_values().max()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn symmetric_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    /// Entry `(i, j)` of the symmetric part, without forming it.
    #[inline]
    pub fn sym(&self, i: usize, j: usize) -> f64 {
        0.5 * (self[(i, j)] + self[(j, i)])
    }

    /// Principal submatrix on the given ordered index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |r, c| self[(idx[r], idx[c])])
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &DenseMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Quadratic form `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let ax = self.matvec(x);
        ax.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Column-stacking vectorisation.
    pub fn vec_columns(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self[(i, j)]);
            }
        }
        out
    }

    pub fn from_vec_columns(rows: usize, cols: usize, v: &[f64]) -> Self {
        Self::from_fn(rows, cols, |i, j| v[j * rows + i])
    }

    /// Replaces rows `idx[k]` by `sum_l g[l][k] * row(idx[l])`, i.e. left
    /// multiplication by `G^T` where `G` is the `m x m` block embedded at `idx`.
    pub(crate) fn rotate_rows(&mut self, idx: &[usize], g: &[f64]) {
        let m = idx.len();
        let cols = self.cols;
        let mut buf = vec![0.0; m];
        for c in 0..cols {
            for (k, b) in buf.iter_mut().enumerate() {
                *b = (0..m).map(|l| g[l * m + k] * self.data[idx[l] * cols + c]).sum();
            }
            for (k, &b) in buf.iter().enumerate() {
                self.data[idx[k] * cols + c] = b;
            }
        }
    }

    /// Replaces columns `idx[k]` by `sum_l col(idx[l]) * g[l][k]`, i.e. right
    /// multiplication by the embedded block `G`.
    pub(crate) fn rotate_cols(&mut self, idx: &[usize], g: &[f64]) {
        let m = idx.len();
        let cols = self.cols;
        let mut buf = vec![0.0; m];
        for r in 0..self.rows {
            let row = &mut self.data[r * cols..(r + 1) * cols];
            for (k, b) in buf.iter_mut().enumerate() {
                *b = (0..m).map(|l| row[idx[l]] * g[l * m + k]).sum();
            }
            for (k, &b) in buf.iter().enumerate() {
                row[idx[k]] = b;
            }
        }
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for x in self.row(i) {
                write!(f, " {x:>12.5e}")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `max |a_ii|`.
pub fn max_abs_diagonal(a: &DenseMatrix) -> f64 {
    a.diagonal().iter().fold(0.0, |m, d| m.max(d.abs()))
}

/// `max a_ii - min a_ii`.
pub fn diagonal_spread(a: &DenseMatrix) -> f64 {
    let d = a.diagonal();
    let hi = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
    if d.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

pub fn is_hollow(a: &DenseMatrix, tol: f64) -> bool {
    max_abs_diagonal(a) <= tol
}

/// Diagonal zero except the trailing pair, which must cancel.
pub fn almost_hollow_residual(a: &DenseMatrix) -> f64 {
    let d = a.diagonal();
    let n = d.len();
    if n < 2 {
        return d.first().map_or(0.0, |x| x.abs());
    }
    let head = d[..n - 2].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    head.max((d[n - 2] + d[n - 1]).abs())
}

pub fn is_almost_hollow(a: &DenseMatrix, tol: f64) -> bool {
    almost_hollow_residual(a) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = DenseMatrix::from_rows(&[[1.0, f64::NAN], [0.0, 1.0]]).unwrap_err();
        assert_eq!(err, Error::NonFinite { row: 0, col: 1 });
    }

    #[test]
    fn vec_is_column_stacking() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(a.vec_columns(), vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(DenseMatrix::from_vec_columns(2, 2, &a.vec_columns()), a);
    }

    #[test]
    fn block_kernels_match_dense_products() {
        let a = DenseMatrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64 - 3.5);
        let (c, s) = (0.6, 0.8);
        let mut g = DenseMatrix::identity(4);
        g[(1, 1)] = c;
        g[(1, 3)] = s;
        g[(3, 1)] = -s;
        g[(3, 3)] = c;
        let block = [c, s, -s, c];
        let mut b = a.clone();
        b.rotate_rows(&[1, 3], &block);
        b.rotate_cols(&[1, 3], &block);
        let expected = g.congruence(&a).unwrap();
        assert!(b.sub(&expected).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn almost_hollow_definition() {
        let a = DenseMatrix::from_diagonal(&[0.0, 0.0, 2.0, -2.0]);
        assert!(is_almost_hollow(&a, 1e-15));
        assert!(!is_hollow(&a, 1e-15));
        let b = DenseMatrix::from_diagonal(&[0.0, 1.0, 2.0, -3.0]);
        assert!(!is_almost_hollow(&b, 1e-15));
    }
}
