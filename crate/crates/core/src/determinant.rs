//! Fredholm determinants `det(1 - zT)` of finite matrices computed three ways:
//! as the eigenvalue product, as the polynomial whose coefficients follow from
//! the traces of powers, and as the exponential trace series
//!
//! ```text
//! det(1 - zT) = exp( -sum_{n>=1} trace(T^n) z^n / n ),   |z| rho(T) < 1.
//! ```
//!
//! Also hosts the Lipschitz-continuity probe for `u -> det(1 - u)` and the
//! contour-integral recovery of the trace from `det(1 + zu)`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::spectral::Spectrum;

/// `p_n = trace(T^n)` for `n = 1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerTraces {
    traces: Vec<Complex64>,
    order: usize,
}

impl PowerTraces {
    /// `p_1, ..., p_N` (index 0 holds `p_1`).
    pub fn traces(&self) -> &[Complex64] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Checks `|p_n| <= d rho^n` against a computed spectrum, with relative slack `rel`.
    pub fn within_spectral_bound(&self, spectrum: &Spectrum, rel: f64) -> bool {
        let rho = spectrum.spectral_radius();
        let d = self.order as f64;
        self.traces.iter().enumerate().all(|(i, p)| {
            let bound = d * rho.powi(i as i32 + 1);
            p.norm() <= bound * (1.0 + rel) + rel
        })
    }
}

/// Traces of `m, m^2, ..., m^n` by repeated multiplication.
pub fn power_traces(m: &DenseMatrix, n: usize) -> Result<PowerTraces> {
    if n == 0 {
        return Err(Error::InvalidArgument("power_traces needs N >= 1".into()));
    }
    let mut traces = Vec::with_capacity(n);
    let mut power = m.clone();
    traces.push(power.trace());
    for _ in 1..n {
        power = power.mul(m);
        traces.push(power.trace());
    }
    Ok(PowerTraces { traces, order: m.order() })
}

/// Coefficients `c_0..c_d` of `det(1 - zT) = sum_m c_m z^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminantPoly {
    pub coefficients: Vec<Complex64>,
}

impl DeterminantPoly {
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::ZERO, |acc, &c| acc * z + c)
    }

    /// `det(1 - zT)` polynomial of a matrix via its power traces.
    pub fn of_matrix(m: &DenseMatrix) -> Result<Self> {
        if m.order() == 0 {
            return Ok(Self { coefficients: vec![Complex64::new(1.0, 0.0)] });
        }
        det_poly_newton(&power_traces(m, m.order())?, m.order())
    }
}

/// Newton recursion `c_m = -(1/m) sum_{j=1}^m p_j c_{m-j}`, `c_0 = 1`.
pub fn det_poly_newton(pt: &PowerTraces, degree: usize) -> Result<DeterminantPoly> {
    if pt.len() < degree {
        return Err(Error::InvalidArgument(format!(
            "degree {degree} needs {degree} power traces, got {}",
            pt.len()
        )));
    }
    let p = pt.traces();
    let mut c = Vec::with_capacity(degree + 1);
    c.push(Complex64::new(1.0, 0.0));
    for m in 1..=degree {
        let s: Complex64 = (1..=m).map(|j| p[j - 1] * c[m - j]).sum();
        c.push(-s / m as f64);
    }
    Ok(DeterminantPoly { coefficients: c })
}

/// `prod_k (1 - mu_k z)`.
pub fn det_product(s: &Spectrum, z: Complex64) -> Complex64 {
    s.eigenvalues().iter().fold(Complex64::new(1.0, 0.0), |acc, mu| acc * (1.0 - mu * z))
}

/// Value of the truncated exponential series and its tail bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: Complex64,
    /// `sum_{n>N} d (rho |z|)^n / n`, bounding the neglected part of the exponent.
    pub tail_bound: f64,
    /// Number of power traces used.
    pub terms: usize,
}

/// Upper bound on the spectral radius: `min_k ||m^(2^k)||_F^(1/2^k)` for `k <= 5`.
pub fn spectral_radius_bound(m: &DenseMatrix) -> f64 {
    let mut power = m.clone();
    let mut best = power.frobenius_norm();
    let mut exponent = 1.0;
    for _ in 0..5 {
        power = power.mul(&power);
        exponent *= 2.0;
        best = best.min(power.frobenius_norm().powf(1.0 / exponent));
    }
    best
}

/// Exponential trace series for `det(1 - zm)`.
///
/// `spectral_radius` is the radius used in the tail bound; when `None`, the
/// rigorous bound of [`spectral_radius_bound`] is used instead.
pub fn det_series(
    m: &DenseMatrix,
    z: Complex64,
    tol: f64,
    spectral_radius: Option<f64>,
) -> Result<SeriesValue> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("series tolerance must be positive, got {tol}")));
    }
    let rho = spectral_radius.unwrap_or_else(|| spectral_radius_bound(m));
    let x = rho * z.norm();
    if !(x < 1.0) {
        return Err(Error::DivergenceRegion { value: x });
    }
    let d = m.order() as f64;
    let tail = |n: usize| -> f64 {
        // sum_{k>n} d x^k / k <= d x^{n+1} / ((n+1)(1-x))
        d * x.powi(n as i32 + 1) / ((n as f64 + 1.0) * (1.0 - x))
    };
    let mut terms = 0usize;
    while tail(terms) >= tol {
        terms += 1;
    }
    if terms == 0 || m.order() == 0 {
        return Ok(SeriesValue { value: Complex64::new(1.0, 0.0), tail_bound: tail(0), terms: 0 });
    }
    let pt = power_traces(m, terms)?;
    let mut zn = Complex64::new(1.0, 0.0);
    let mut exponent = Complex64::ZERO;
    for (i, p) in pt.traces().iter().enumerate() {
        zn *= z;
        exponent -= p * zn / (i + 1) as f64;
    }
    Ok(SeriesValue { value: exponent.exp(), tail_bound: tail(terms), terms })
}

/// Norm standing in for the ideal quasinorm in the continuity probe.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeNorm {
    /// Sum of singular values; satisfies `|trace R| <= ||R||`, so `b = 1` holds.
    #[default]
    Trace,
    /// Largest singular value.
    Operator,
}

impl ProbeNorm {
    pub fn of(&self, m: &DenseMatrix) -> f64 {
        match self {
            Self::Trace => m.trace_norm(),
            Self::Operator => m.operator_norm(),
        }
    }
}

/// Outcome of one continuity probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    /// `|det(1-u) - det(1-v)| / ||u - v||`, 0 when `u = v`.
    pub ratio: f64,
    /// `c_0 = c_1 b sum_{n>=1} n^{1/s-1} r0^{n-1}`.
    pub ceiling: f64,
    pub c1: f64,
    pub b: f64,
    pub s: f64,
    pub r0: f64,
    pub norm: ProbeNorm,
    pub distance: f64,
}

/// Constants `(c_1, c_0)` of the continuity bound for `s = 1`, `b = 1` and
/// `c_1 = exp(r0 / (1 - r0))`.
pub fn continuity_ceiling(r0: f64) -> (f64, f64) {
    let s = 1.0;
    let c1 = (r0 / (1.0 - r0)).exp();
    let mut series = 0.0;
    let mut n = 1u32;
    loop {
        let term = f64::from(n).powf(1.0 / s - 1.0) * r0.powi(n as i32 - 1);
        series += term;
        if term < 1e-18 * series || n > 100_000 {
            break;
        }
        n += 1;
    }
    (c1, c1 * series)
}

/// Lipschitz quotient of `u -> det(1 - u)` between two matrices in the `r0`-ball.
pub fn continuity_probe(u: &DenseMatrix, v: &DenseMatrix, r0: f64, norm: ProbeNorm) -> Result<ContinuityReport> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(Error::InvalidArgument(format!("continuity probe needs 0 < r0 < 1, got {r0}")));
    }
    if u.order() != v.order() {
        return Err(Error::DimensionMismatch { expected: u.order(), found: v.order() });
    }
    for m in [u, v] {
        let n = norm.of(m);
        if n > r0 * (1.0 + 1e-12) {
            return Err(Error::NormBound { norm: n, r0 });
        }
    }
    let (c1, ceiling) = continuity_ceiling(r0);
    let distance = norm.of(&u.sub(v));
    let ratio = if distance == 0.0 {
        0.0
    } else {
        (u.one_minus().determinant() - v.one_minus().determinant()).norm() / distance
    };
    Ok(ContinuityReport { ratio, ceiling, c1, b: 1.0, s: 1.0, r0, norm, distance })
}

/// One row of the power-difference check `||u^n - v^n|| <= n q^{n-1} ||u - v||`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerDifference {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl PowerDifference {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

/// Both sides of the power-difference inequality in the operator norm for `n = 1..=max_n`.
pub fn power_differences(u: &DenseMatrix, v: &DenseMatrix, max_n: usize) -> Result<Vec<PowerDifference>> {
    if u.order() != v.order() {
        return Err(Error::DimensionMismatch { expected: u.order(), found: v.order() });
    }
    let q = u.operator_norm().max(v.operator_norm());
    let dist = u.sub(v).operator_norm();
    let mut un = u.clone();
    let mut vn = v.clone();
    let mut rows = Vec::with_capacity(max_n);
    for n in 1..=max_n {
        if n > 1 {
            un = un.mul(u);
            vn = vn.mul(v);
        }
        rows.push(PowerDifference {
            n,
            lhs: un.sub(&vn).operator_norm(),
            rhs: n as f64 * q.powi(n as i32 - 1) * dist,
        });
    }
    Ok(rows)
}

/// Fewest quadrature points accepted by [`trace_from_det_residue`].
pub const MIN_QUADRATURE_POINTS: usize = 64;

/// `(1 / 2 pi i) \oint_{|z|=1} (f(z) - 1) / z^2 dz` by the trapezoidal rule.
///
/// With `f(z) = det(1 + zu)` this returns `trace(u)`; the rule is exact for
/// polynomials of degree below the number of points.
pub fn trace_from_det_residue<F>(detfun: F, points: usize) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if points < MIN_QUADRATURE_POINTS {
        return Err(Error::TooFewPoints { got: points, min: MIN_QUADRATURE_POINTS });
    }
    let one = Complex64::new(1.0, 0.0);
    let sum: Complex64 = (0..points)
        .map(|j| {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / points as f64);
            // dz = i z dtheta, so the integrand becomes (f(z) - 1) / z
            (detfun(z) - one) / z
        })
        .sum();
    Ok(sum / points as f64)
}

/// The three determinant evaluations at one point `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminantComparison {
    pub z: Complex64,
    pub product: Complex64,
    pub newton: Complex64,
    /// `None` when `z` lies in the divergence region of the series.
    pub series: Option<Complex64>,
    pub max_pairwise_diff: f64,
}

/// Evaluates `det(1 - zm)` by product, Newton polynomial and trace series at every `z`.
pub fn compare_determinants(
    m: &DenseMatrix,
    spectrum: &Spectrum,
    zs: &[Complex64],
    tol: f64,
) -> Result<Vec<DeterminantComparison>> {
    let poly = DeterminantPoly::of_matrix(m)?;
    let rho = spectrum.spectral_radius();
    zs.iter()
        .map(|&z| {
            let product = det_product(spectrum, z);
            let newton = poly.eval(z);
            let series = match det_series(m, z, tol, Some(rho)) {
                Ok(v) => Some(v.value),
                Err(Error::DivergenceRegion { .. }) => None,
                Err(e) => return Err(e),
            };
            let mut diff = (product - newton).norm();
            if let Some(s) = series {
                diff = diff.max((product - s).norm()).max((newton - s).norm());
            }
            Ok(DeterminantComparison { z, product, newton, series, max_pairwise_diff: diff })
        })
        .collect()
}

/// Complex value as `re+imi` (e.g. `0.5-0.25i`); empty for a missing value.
pub fn format_complex(z: Option<Complex64>) -> String {
    match z {
        None => String::new(),
        Some(z) if z.im.is_sign_negative() => format!("{}-{}i", z.re, -z.im),
        Some(z) => format!("{}+{}i", z.re, z.im),
    }
}

/// CSV header of determinant comparison tables.
pub const COMPARISON_HEADER: &str = "trial,z_re,z_im,product,newton,series,max_pairwise_diff";

/// Appends comparison rows for `trial` to a CSV table.
pub fn write_comparison_rows(out: &mut String, trial: usize, rows: &[DeterminantComparison]) {
    for r in rows {
        let _ = writeln!(
            out,
            "{trial},{},{},{},{},{},{}",
            r.z.re,
            r.z.im,
            format_complex(Some(r.product)),
            format_complex(Some(r.newton)),
            format_complex(r.series),
            r.max_pairwise_diff
        );
    }
}
