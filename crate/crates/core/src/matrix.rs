//! Square complex matrices and the norms used throughout the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A finite square complex matrix: the finite-rank operator under study.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix(DMatrix<Complex64>);

impl DenseMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if let Some(index) = m.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(m))
    }

    /// Builds a matrix from row-major real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: bad.len() });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn identity(order: usize) -> Self {
        Self(DMatrix::identity(order, order))
    }

    pub fn zeros(order: usize) -> Self {
        Self(DMatrix::zeros(order, order))
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self(DMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { Complex64::ZERO }))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.diagonal().iter().sum()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self(&self.0 * c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    /// `1 - self`.
    pub fn one_minus(&self) -> Self {
        Self(DMatrix::identity(self.order(), self.order()) - &self.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.0)
    }

    /// Operator 2-norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        operator_norm(&self.0)
    }

    /// Trace norm (sum of singular values).
    pub fn trace_norm(&self) -> f64 {
        trace_norm(&self.0)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        lu_determinant(self.0.clone())
    }

    /// Rescales the matrix so that its operator norm equals `target`.
    /// The zero matrix is returned unchanged.
    pub fn with_operator_norm(&self, target: f64) -> Self {
        let n = self.operator_norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scaled(Complex64::new(target / n, 0.0))
        }
    }
}

impl From<DenseMatrix> for DMatrix<Complex64> {
    fn from(m: DenseMatrix) -> Self {
        m.0
    }
}

pub fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().singular_values().iter().copied().collect()
}

/// Largest singular value of a (possibly rectangular) matrix; 0 when empty.
pub fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

pub fn trace_norm(m: &DMatrix<Complex64>) -> f64 {
    singular_values(m).into_iter().sum()
}

fn lu_determinant(mut a: DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let (pivot_row, pivot_abs) = (k..n)
            .map(|i| (i, a[(i, k)].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs == 0.0 {
            return Complex64::ZERO;
        }
        if pivot_row != k {
            a.swap_rows(pivot_row, k);
            det = -det;
        }
        let pivot = a[(k, k)];
        det *= pivot;
        for i in (k + 1)..n {
            let factor = a[(i, k)] / pivot;
            if factor == Complex64::ZERO {
                continue;
            }
            for j in (k + 1)..n {
                let akj = a[(k, j)];
                a[(i, j)] -= factor * akj;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_rectangular_and_nonfinite() {
        assert!(matches!(DenseMatrix::new(DMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
        let mut m = DMatrix::zeros(2, 2);
        m[(1, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(DenseMatrix::new(m), Err(Error::NonFinite { index: 1 })));
    }

    #[test]
    fn determinant_of_small_matrices() {
        let m = DenseMatrix::from_real_rows(&[&[0.0, 2.0], &[3.0, 1.0]]).unwrap();
        assert!((m.determinant() - c(-6.0, 0.0)).norm() < 1e-15);
        let d = DenseMatrix::diagonal(&[c(1.0, 1.0), c(2.0, 0.0)]);
        assert!((d.determinant() - c(2.0, 2.0)).norm() < 1e-15);
        assert_eq!(DenseMatrix::zeros(3).determinant(), Complex64::ZERO);
        assert_eq!(DenseMatrix::zeros(0).determinant(), c(1.0, 0.0));
    }

    #[test]
    fn norms_of_a_diagonal() {
        let d = DenseMatrix::diagonal(&[c(3.0, 0.0), c(0.0, -4.0), c(1.0, 0.0)]);
        assert!((d.operator_norm() - 4.0).abs() < 1e-14);
        assert!((d.trace_norm() - 8.0).abs() < 1e-13);
        assert!((d.frobenius_norm() - 26f64.sqrt()).abs() < 1e-14);
        assert!((d.with_operator_norm(0.5).operator_norm() - 0.5).abs() < 1e-15);
    }
}
