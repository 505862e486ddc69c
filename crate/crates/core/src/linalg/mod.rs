//! Dense real linear algebra.
//!
//! Everything in the crate is expressed in terms of [`DenseMatrix`], a plain
//! row-major `f64` container. The operations here are the small set the
//! spectral pipeline needs: products, norms, orthonormalization, a symmetric
//! eigensolver and a thin SVD computed from the Gram matrix.

mod eigen;
mod ortho;

use std::fmt;
use std::ops::{Index, IndexMut};

use rayon::prelude::*;

use crate::error::{Error, Result};

pub use eigen::{jacobi_eigh, symmetric_eigh, tridiagonal_eigh, EighResult};
pub use ortho::{gram_schmidt, thin_svd_via_gram, ThinSvdResult};

/// Work (in multiply-adds) below which `matmul` stays on the calling thread.
const PARALLEL_WORK_THRESHOLD: usize = 1 << 16;

/// Row-major dense matrix of finite `f64` values.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

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

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Builds a matrix from equally long columns.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::Shape(format!(
                    "column {j} has {} entries, expected {rows}",
                    c.len()
                )));
            }
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        if let Some(pos) = m.data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(m)
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

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// First `k` columns as a new matrix.
    pub fn leading_columns(&self, k: usize) -> Self {
        let k = k.min(self.cols);
        Self::from_fn(self.rows, k, |i, j| self[(i, j)])
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * alpha).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        matmul(self, other)
    }

    /// `selfᵀ * other` without materializing the transpose.
    pub fn t_matmul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Shape(format!(
                "cannot form AᵀB with A {}x{} and B {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.cols, other.cols);
        for l in 0..self.rows {
            let a_row = self.row(l);
            let b_row = other.row(l);
            for (i, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let out_row = out.row_mut(i);
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest `|a_ij - a_ji|`; `None` for non-square input.
    pub fn asymmetry(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        Some(worst)
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
        for i in 0..self.rows.min(8) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(8)])?;
        }
        write!(f, "]")
    }
}

/// Matrix product.
///
/// Output rows are computed independently (and in parallel for large
/// products). Each entry accumulates over the inner index in ascending order,
/// so the result does not depend on the number of threads.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(Error::Shape(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let (n, inner, m) = (a.rows, a.cols, b.cols);
    let mut out = DenseMatrix::zeros(n, m);
    if m == 0 || n == 0 {
        return Ok(out);
    }
    let row_kernel = |(i, out_row): (usize, &mut [f64])| {
        let a_row = a.row(i);
        for (l, &a_il) in a_row.iter().enumerate() {
            if a_il == 0.0 {
                continue;
            }
            let b_row = b.row(l);
            for (o, &b_lj) in out_row.iter_mut().zip(b_row) {
                *o += a_il * b_lj;
            }
        }
    };
    if n * inner * m >= PARALLEL_WORK_THRESHOLD {
        out.data.par_chunks_mut(m).enumerate().for_each(row_kernel);
    } else {
        out.data.chunks_mut(m).enumerate().for_each(row_kernel);
    }
    Ok(out)
}

/// Square root of the sum of squared entries.
pub fn frobenius_norm(a: &DenseMatrix) -> f64 {
    // Scaled accumulation so huge or tiny entries do not over/underflow.
    let scale = a.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = a.data.iter().map(|v| (v / scale).powi(2)).sum();
    scale * sum.sqrt()
}

/// Largest singular value, from the top eigenvalue of the smaller Gram matrix.
pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    if a.rows == 0 || a.cols == 0 {
        return 0.0;
    }
    let gram = if a.cols <= a.rows {
        a.t_matmul(a)
    } else {
        let at = a.transpose();
        at.t_matmul(&at)
    }
    .expect("gram shapes always agree");
    match symmetric_eigh(&gram) {
        Ok(eig) => eig.eigenvalues[0].max(0.0).sqrt(),
        // Jacobi on a Gram matrix converges in practice; fall back to the
        // Frobenius norm, which is a valid upper bound, if it ever does not.
        Err(_) => frobenius_norm(a),
    }
}

/// Dot product of equally long slices.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(matches!(DenseMatrix::new(2, 2, vec![1.0; 3]), Err(Error::Shape(_))));
        assert_eq!(
            DenseMatrix::new(2, 2, vec![1.0, 2.0, f64::NAN, 4.0]),
            Err(Error::NonFinite { row: 1, col: 0 })
        );
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn matmul_identity_and_zero() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.5]]).unwrap();
        assert_eq!(matmul(&DenseMatrix::identity(3), &a).unwrap(), a);
        let any = DenseMatrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64 - 3.5);
        assert_eq!(matmul(&DenseMatrix::zeros(2, 3), &any).unwrap(), DenseMatrix::zeros(2, 4));
    }

    #[test]
    fn matmul_hand_example() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[[5.0], [6.0]]).unwrap();
        let c = matmul(&a, &b).unwrap();
        assert_eq!(c.as_slice(), &[17.0, 39.0]);
    }

    #[test]
    fn matmul_shape_error() {
        let a = DenseMatrix::zeros(2, 3);
        assert!(matches!(matmul(&a, &a), Err(Error::Shape(_))));
    }

    #[test]
    fn matmul_parallel_matches_serial_bitwise() {
        let a = DenseMatrix::from_fn(97, 61, |i, j| ((i * 31 + j * 17) % 23) as f64 / 7.0 - 1.3);
        let b = DenseMatrix::from_fn(61, 53, |i, j| ((i * 13 + j * 5) % 19) as f64 / 3.0 - 2.9);
        let par = matmul(&a, &b).unwrap();
        let mut serial = DenseMatrix::zeros(97, 53);
        for i in 0..97 {
            for l in 0..61 {
                for j in 0..53 {
                    serial[(i, j)] += a[(i, l)] * b[(l, j)];
                }
            }
        }
        assert_eq!(par, serial);
        assert_eq!(a.t_matmul(&a).unwrap(), matmul(&a.transpose(), &a).unwrap());
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(frobenius_norm(&DenseMatrix::zeros(3, 2)), 0.0);
        assert!(close(frobenius_norm(&DenseMatrix::identity(3)), 3f64.sqrt(), 1e-15));
        let row = DenseMatrix::from_rows(&[[3.0, 4.0]]).unwrap();
        assert!(close(frobenius_norm(&row), 5.0, 1e-15));
    }

    #[test]
    fn spectral_norm_examples() {
        assert!(close(spectral_norm(&DenseMatrix::identity(4)), 1.0, 1e-12));
        assert!(close(spectral_norm(&DenseMatrix::from_diag(&[3.0, -7.0])), 7.0, 1e-12));
        // u vᵀ with |u| = 2, |v| = 3.
        let u = [2.0 / 3f64.sqrt(); 3];
        let v = [0.0, 3.0 * 0.6, 3.0 * 0.8, 0.0];
        let uv = DenseMatrix::from_fn(3, 4, |i, j| u[i] * v[j]);
        assert!(close(spectral_norm(&uv), 6.0, 1e-10));
        assert_eq!(spectral_norm(&DenseMatrix::zeros(0, 0)), 0.0);
    }
}
