use std::ops::{Deref, DerefMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CVector(Vec<C64>);

impl CVector {
    /// Wraps `entries`, rejecting empty or non-finite input.
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("vector must have at least one entry"));
        }
        if let Some(i) = entries.iter().position(|z| !z.is_finite()) {
            return Err(Error::invalid(format!("vector entry {i} is not finite")));
        }
        Ok(CVector(entries))
    }

    pub fn zeros(len: usize) -> Self {
        CVector(vec![ZERO; len])
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<C64>) -> Self {
        CVector(entries)
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }
}

impl Deref for CVector {
    type Target = [C64];

    fn deref(&self) -> &[C64] {
        &self.0
    }
}

impl DerefMut for CVector {
    fn deref_mut(&mut self) -> &mut [C64] {
        &mut self.0
    }
}

/// Euclidean norm of a complex slice.
pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `aᴴb`.
pub fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// Builds a matrix from row-major `data`, rejecting non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "CMatrix::new",
                expected: rows * cols,
                found: data.len(),
            });
        }
        let m = CMatrix { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("ragged rows"));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| C64::new(v, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|z| !z.is_finite()) {
            Some(k) => Err(Error::invalid(format!(
                "matrix entry ({}, {}) is not finite",
                k / self.cols,
                k % self.cols
            ))),
            None => Ok(()),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul",
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<CVector> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                context: "mul_vec",
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = vec![ZERO; self.rows];
        self.mul_vec_into(v, &mut out);
        Ok(CVector::from_vec_unchecked(out))
    }

    /// `out = self · v` without dimension checks.
    #[inline]
    pub(crate) fn mul_vec_into(&self, v: &[C64], out: &mut [C64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `selfᴴ · v`.
    pub fn adjoint_mul_vec(&self, v: &[C64]) -> Result<CVector> {
        if self.rows != v.len() {
            return Err(Error::DimensionMismatch {
                context: "adjoint_mul_vec",
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = vec![ZERO; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * vi;
            }
        }
        Ok(CVector::from_vec_unchecked(out))
    }

    pub fn sub(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                context: "sub",
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: f64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Copies the sub-block starting at `(r0, c0)` of size `nr × nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> CMatrix {
        Self::from_fn(nr, nc, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Copies the selected columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> CMatrix {
        Self::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]))
    }

    /// `‖X − Xᴴ‖_max`; only meaningful for square matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..=i {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }
}

/// A square matrix validated to be Hermitian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HermitianView(CMatrix);

impl HermitianView {
    /// Validates `m` against `‖X − Xᴴ‖_max ≤ 1e−10·‖X‖_max` and a real diagonal.
    ///
    /// Violations are rejected rather than symmetrized.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                context: "HermitianView::new",
                expected: m.rows,
                found: m.cols,
            });
        }
        m.check_finite()?;
        let scale = m.max_abs();
        let dev = m.hermitian_deviation();
        if dev > 1e-10 * scale {
            return Err(Error::NotHermitian { deviation: dev });
        }
        for i in 0..m.rows {
            let d = m.get(i, i);
            if d.im.abs() > 1e-12 * (d.re + 1.0).abs() {
                return Err(Error::NotHermitian {
                    deviation: d.im.abs(),
                });
            }
        }
        Ok(HermitianView(m))
    }

    /// Trusts the caller that `m` is exactly Hermitian.
    pub(crate) fn from_exact(m: CMatrix) -> Self {
        debug_assert!(m.is_square());
        HermitianView(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }
}

impl Deref for HermitianView {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

/// Mirrors the lower triangle into the upper one and forces a real diagonal.
pub(crate) fn hermitize_from_lower(m: &mut CMatrix) {
    let n = m.rows;
    for i in 0..n {
        let d = m.get(i, i);
        m.set(i, i, C64::new(d.re, 0.0));
        for j in 0..i {
            let v = m.get(i, j).conj();
            m.set(j, i, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_rejects_empty_and_nan() {
        assert!(CVector::new(vec![]).is_err());
        assert!(CVector::new(vec![C64::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn matrix_rejects_bad_shape() {
        assert!(CMatrix::new(2, 2, vec![ONE; 3]).is_err());
        assert!(CMatrix::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn hermitian_view_rejects_asymmetry() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 1.0]]).unwrap();
        assert!(matches!(
            HermitianView::new(m),
            Err(Error::NotHermitian { .. })
        ));
        let mut m = CMatrix::identity(2);
        m.set(0, 0, C64::new(1.0, 0.5));
        assert!(HermitianView::new(m).is_err());
    }

    #[test]
    fn matmul_matches_hand_product() {
        let a = CMatrix::from_rows(&[
            vec![C64::new(1.0, 1.0), C64::new(0.0, 2.0)],
            vec![C64::new(3.0, 0.0), C64::new(1.0, -1.0)],
        ])
        .unwrap();
        let p = a.matmul(&a.adjoint()).unwrap();
        // row0·row0ᴴ = |1+i|² + |2i|² = 6
        assert!((p.get(0, 0) - C64::new(6.0, 0.0)).norm() < 1e-15);
        // row0·row1ᴴ = (1+i)·3 + 2i·(1+i) = 1 + 5i
        assert!((p.get(0, 1) - C64::new(1.0, 5.0)).norm() < 1e-15);
    }
}
