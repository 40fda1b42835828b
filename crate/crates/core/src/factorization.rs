//! Factorization of a finite nuclear representation through sequence spaces,
//!
//! ```text
//! X --A--> l_inf --Delta--> l_1 --j--> l_p --V--> X,     T = V Delta A,
//! ```
//!
//! the transported operator `S = Delta A V` on `l_p`, and the comparison of
//! the nonzero spectra of `AB` and `BA`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::Exponent;
use crate::matrix::{operator_norm, DenseMatrix};
use crate::nuclear::NuclearRep;
use crate::spectral::{eigenvalues, multiset_distance};
use crate::weaknorm::{weak_norm, weak_norm_inf};

/// Norms of the individual factors of the diagram.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorNorms {
    /// `||A : X -> l_inf|| = max_k |x'_k|`.
    pub a: f64,
    /// `||Delta : l_inf -> l_1|| = sum_k |lambda_k|`.
    pub delta: f64,
    /// `||j : l_1 -> l_p|| = 1`.
    pub j: f64,
    /// `||V : l_p -> X|| = eps_{p'}(x)`.
    pub v: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpFactorization {
    /// `N x d`, rows `x'_k`.
    pub a: DMatrix<Complex64>,
    /// Diagonal of `Delta`.
    pub delta: Vec<Complex64>,
    /// `d x N`, columns `x_k`.
    pub v: DMatrix<Complex64>,
    pub p: f64,
    pub norms: FactorNorms,
    /// `||A|| ||Delta|| ||j|| ||V||`.
    pub gamma_upper: f64,
    /// False when `||V||` came from the weak-norm estimator (`1 < p < 2`).
    pub certified: bool,
}

impl LpFactorization {
    pub fn delta_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.delta))
    }

    /// `Delta A`, the `N x d` map `X -> l_p`.
    pub fn delta_a(&self) -> DMatrix<Complex64> {
        let mut m = self.a.clone();
        for (k, &l) in self.delta.iter().enumerate() {
            for z in m.row_mut(k).iter_mut() {
                *z *= l;
            }
        }
        m
    }

    /// `V Delta A`, which equals the assembled operator.
    pub fn compose(&self) -> DenseMatrix {
        DenseMatrix::new(&self.v * self.delta_a()).expect("d x d product of finite factors")
    }
}

/// Diagonal factorization of `rep` through `l_p`, `1 <= p <= 2`.
pub fn build_diagonal_factorization(rep: &NuclearRep, p: f64) -> Result<LpFactorization> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InadmissibleExponents(format!("factorization through l_p needs 1 <= p <= 2, got {p}")));
    }
    let a = rep.functionals().as_matrix().clone();
    let v = rep.vectors().as_matrix().transpose();
    let delta = rep.lambda().entries().to_vec();
    let delta_norm = delta.iter().map(|z| z.norm()).sum();
    let (a_norm, v_norm, certified) = if rep.is_empty() {
        (0.0, 0.0, true)
    } else {
        let conj = Exponent::conjugate_of(p)?;
        let (v_norm, exact) = weak_norm(rep.vectors(), conj, 16, 0)?;
        (weak_norm_inf(rep.functionals())?, v_norm, exact)
    };
    let norms = FactorNorms { a: a_norm, delta: delta_norm, j: 1.0, v: v_norm };
    Ok(LpFactorization {
        a,
        delta,
        v,
        p,
        gamma_upper: norms.a * norms.delta * norms.j * norms.v,
        norms,
        certified,
    })
}

/// `S = j Delta A V`, an `N x N` matrix whose trace is the nuclear trace.
pub fn build_s(f: &LpFactorization) -> DenseMatrix {
    DenseMatrix::new(f.delta_a() * &f.v).expect("N x N product of finite factors")
}

/// Result of comparing the nonzero spectra of `AB` and `BA`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComparison {
    pub max_diff: f64,
    pub matched_count: usize,
    pub pass: bool,
}

/// Largest allowed mismatch between matched nonzero eigenvalues.
pub const AB_BA_TOLERANCE: f64 = 1e-7;

/// Compares the nonzero eigenvalues of `AB` (`m x m`) and `BA` (`n x n`) for
/// `A: m x n`, `B: n x m`. Eigenvalues of modulus below `1e-9 max(1, |A||B|)`
/// count as zero.
pub fn ab_ba_spectrum_check(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Result<SpectrumComparison> {
    if a.ncols() != b.nrows() || a.nrows() != b.ncols() {
        return Err(Error::Shape(format!(
            "A is {}x{} and B is {}x{}; need m x n and n x m",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if a.iter().chain(b.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite factor entries".into()));
    }
    let scale = if a.is_empty() || b.is_empty() { 0.0 } else { operator_norm(a) * operator_norm(b) };
    let threshold = 1e-9 * scale.max(1.0);
    let ab = eigenvalues(&DenseMatrix::new(a * b)?)?.nonzero(threshold);
    let ba = eigenvalues(&DenseMatrix::new(b * a)?)?.nonzero(threshold);
    Ok(match multiset_distance(&ab, &ba) {
        Some(d) => SpectrumComparison { max_diff: d, matched_count: ab.len(), pass: d <= AB_BA_TOLERANCE },
        None => SpectrumComparison {
            max_diff: f64::INFINITY,
            matched_count: ab.len().min(ba.len()),
            pass: false,
        },
    })
}

/// Largest entry of `|V Delta A - T|`.
pub fn diagram_defect(f: &LpFactorization, assembled: &DenseMatrix) -> f64 {
    let diff = f.compose().into_inner() - assembled.as_matrix();
    diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
