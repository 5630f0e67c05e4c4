use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[allow(non_camel_case_types)]
pub type c64 = Complex64;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<c64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<c64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("empty shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix shape");
        Self {
            rows,
            cols,
            data: vec![c64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> c64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Real matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        Self::from_fn(rows.len(), cols, |i, j| {
            assert_eq!(rows[i].len(), cols, "ragged rows");
            c64::new(rows[i][j], 0.0)
        })
    }

    pub fn from_rows(rows: &[&[c64]]) -> Self {
        let cols = rows[0].len();
        Self::from_fn(rows.len(), cols, |i, j| {
            assert_eq!(rows[i].len(), cols, "ragged rows");
            rows[i][j]
        })
    }

    pub fn from_diag(diag: &[c64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<c64> = diag.iter().map(|&x| c64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<c64>]) -> Self {
        let rows = columns[0].len();
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    /// `n x n` lower shift: ones on the first subdiagonal.
    pub fn lower_shift(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j + 1 {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[c64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [c64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<c64> {
        self.data
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn row(&self, i: usize) -> &[c64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<c64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: c64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(c64) -> c64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        debug_assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖M − M*‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn trace(&self) -> c64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self* · rhs` without materializing the adjoint.
    pub fn adjoint_mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "adjoint_mul shape mismatch");
        let mut out = Self::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            let lhs_row = self.row(k);
            let rhs_row = rhs.row(k);
            for (i, a) in lhs_row.iter().enumerate() {
                let a = a.conj();
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[c64]) -> Vec<c64> {
        assert_eq!(self.cols, x.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Copy of the `rows x cols` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "set_block out of range"
        );
        for i in 0..b.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + b.cols].copy_from_slice(b.row(i));
        }
    }

    pub fn add_block(&mut self, r0: usize, c0: usize, b: &Self) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "add_block out of range"
        );
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] += b[(i, j)];
            }
        }
    }

    /// `[top; bottom]`.
    pub fn vstack(top: &Self, bottom: &Self) -> Result<Self> {
        if top.cols != bottom.cols {
            return Err(Error::Shape(format!(
                "vstack of {}-column and {}-column matrices",
                top.cols, bottom.cols
            )));
        }
        let mut data = top.data.clone();
        data.extend_from_slice(&bottom.data);
        Ok(Self {
            rows: top.rows + bottom.rows,
            cols: top.cols,
            data,
        })
    }

    /// `[left | right]`.
    pub fn hstack(left: &Self, right: &Self) -> Result<Self> {
        if left.rows != right.rows {
            return Err(Error::Shape(format!(
                "hstack of {}-row and {}-row matrices",
                left.rows, right.rows
            )));
        }
        let mut out = Self::zeros(left.rows, left.cols + right.cols);
        out.set_block(0, 0, left);
        out.set_block(0, left.cols, right);
        Ok(out)
    }

    /// Block-diagonal matrix with `count` copies of `b`.
    pub fn block_diag_repeat(b: &Self, count: usize) -> Self {
        let mut out = Self::zeros(b.rows * count, b.cols * count);
        for k in 0..count {
            out.set_block(k * b.rows, k * b.cols, b);
        }
        out
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = c64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &c64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut c64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub(crate) fn dot(x: &[c64], y: &[c64]) -> c64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn vec_norm(x: &[c64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_nan() {
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(2, 2, vec![c64::new(1.0, 0.0); 3]).is_err());
        let mut d = vec![c64::new(0.0, 0.0); 4];
        d[3] = c64::new(f64::NAN, 0.0);
        assert!(matches!(
            ComplexMatrix::new(2, 2, d),
            Err(Error::NonFinite { row: 1, col: 1 })
        ));
    }

    #[test]
    fn adjoint_mul_matches_explicit_product() {
        let a = ComplexMatrix::from_fn(3, 2, |i, j| c64::new(i as f64 - 1.0, j as f64 + 0.5));
        let b = ComplexMatrix::from_fn(3, 4, |i, j| c64::new((i * j) as f64, 1.0 - i as f64));
        assert!(a.adjoint_mul(&b).max_abs_diff(&a.adjoint().matmul(&b)) < 1e-15);
    }

    #[test]
    fn stacking_and_blocks() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::lower_shift(2);
        let v = ComplexMatrix::vstack(&a, &b).unwrap();
        assert_eq!(v.shape(), (4, 2));
        assert_eq!(v.block(2, 0, 2, 2), b);
        let h = ComplexMatrix::hstack(&a, &b).unwrap();
        assert_eq!(h.block(0, 2, 2, 2), b);
        assert!(ComplexMatrix::vstack(&a, &ComplexMatrix::zeros(1, 3)).is_err());
    }
}
