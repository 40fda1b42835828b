//! Weak `l_q` norms of finite vector families in Euclidean space:
//!
//! ```text
//! eps_q((x_i)) = sup_{|u| <= 1} ( sum_i |<u, x_i>|^q )^{1/q}
//! ```
//!
//! With rows `x_i` stacked into an `N x d` matrix `M` this is the `2 -> q`
//! operator norm of `M`. The cases `q = inf` (largest row norm) and `q = 2`
//! (largest singular value) are exact; every other `q` is reported as a
//! certified lower bound found by local ascent from several starting points.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lorentz::{Exponent, ScalarRepr};
use crate::sampling::{complex_unit_vector, derive_seed, rng_from_seed};

/// `N` vectors of a common dimension `d >= 1`, stored as the rows of an `N x d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFamily {
    rows: DMatrix<Complex64>,
}

impl VectorFamily {
    pub fn from_rows(vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = vectors.first().map(Vec::len).ok_or(Error::EmptyFamily)?;
        Self::with_dim(vectors, dim)
    }

    /// Builds a family with an explicit dimension; `vectors` may be empty.
    pub fn with_dim(vectors: Vec<Vec<Complex64>>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
        let n = vectors.len();
        let rows = DMatrix::from_fn(n, dim, |i, j| vectors[i][j]);
        Self::from_matrix(rows)
    }

    pub fn from_matrix(rows: DMatrix<Complex64>) -> Result<Self> {
        if rows.ncols() == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if let Some(index) = rows.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { rows })
    }

    pub fn from_real_rows(vectors: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            vectors.iter().map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect(),
        )
    }

    /// The canonical basis `e_1, ..., e_d`.
    pub fn canonical_basis(dim: usize) -> Result<Self> {
        Self::from_matrix(DMatrix::identity(dim, dim))
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.rows
    }

    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.rows.row(i).iter().copied().collect()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { rows: &self.rows * c }
    }

    /// Appends a zero vector.
    pub fn push_zero(&mut self) {
        let n = self.rows.nrows();
        self.rows = std::mem::take(&mut self.rows).insert_row(n, Complex64::ZERO);
    }
}

impl Serialize for VectorFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<ScalarRepr>> = (0..self.len())
            .map(|i| self.rows.row(i).iter().map(|&z| ScalarRepr::from(z)).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VectorFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Vec<ScalarRepr>>::deserialize(d)?;
        let rows = raw.into_iter().map(|v| v.into_iter().map(Complex64::from).collect()).collect();
        Self::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// `eps_inf`: the largest Euclidean norm in the family.
pub fn weak_norm_inf(family: &VectorFamily) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(family
        .rows
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max))
}

/// `eps_2`: the largest singular value of the stacked family.
pub fn weak_norm_2(family: &VectorFamily) -> Result<f64> {
    Ok(top_singular_pair(family)?.0)
}

/// Largest singular value and a unit `u` with `|M u| = sigma_max`.
fn top_singular_pair(family: &VectorFamily) -> Result<(f64, Vec<Complex64>)> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let svd = family.rows.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let (k, &sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    // M v = sigma u for v = (row k of V^H)^H
    let u = v_t.row(k).iter().map(|z| z.conj()).collect();
    Ok((sigma.max(0.0), u))
}

/// A certified lower bound on `eps_q` with the direction that attains it.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakNormEstimate {
    pub lower: f64,
    pub witness: Vec<Complex64>,
}

/// `( sum_i |<u, x_i>|^q )^{1/q}` for the given direction `u`, as-is (not normalized).
pub fn weak_objective(family: &VectorFamily, u: &[Complex64], q: Exponent) -> Result<f64> {
    if u.len() != family.dim() {
        return Err(Error::DimensionMismatch { expected: family.dim(), found: u.len() });
    }
    let y = &family.rows * DVector::from_column_slice(u);
    Ok(lq_norm(y.iter().map(|z| z.norm()), q))
}

fn lq_norm(values: impl Iterator<Item = f64> + Clone, q: Exponent) -> f64 {
    let max = values.clone().fold(0.0, f64::max);
    match q {
        Exponent::Infinite => max,
        Exponent::Finite(_) if max == 0.0 => 0.0,
        Exponent::Finite(q) => max * values.map(|v| (v / max).powf(q)).sum::<f64>().powf(1.0 / q),
    }
}

/// Lower bound on `eps_q` for `2 <= q < inf`.
///
/// Candidate starts are the `q = 2` maximizer, the `trials` normalized family
/// members with the largest objective and `trials` random unit directions.
/// Each start is advanced a few steps of the ascent iteration
/// `u <- M^H(|Mu|^{q-2} Mu)` normalized, which never decreases a convex
/// objective; the best few are then iterated until the relative gain drops
/// below `1e-10`.
pub fn weak_norm_q_estimate(
    family: &VectorFamily,
    q: f64,
    trials: usize,
    seed: u64,
) -> Result<WeakNormEstimate> {
    if !(q >= 2.0 && q.is_finite()) {
        return Err(Error::InvalidArgument(format!("weak-norm estimator needs 2 <= q < inf, got {q}")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("weak-norm estimator needs trials >= 1".into()));
    }
    ascent_lower_bound(family, q, trials, seed)
}

/// Same search as [`weak_norm_q_estimate`] without the `q >= 2` restriction;
/// the result stays a valid lower bound but the ascent may stall for `q < 1`.
pub(crate) fn ascent_lower_bound(
    family: &VectorFamily,
    q: f64,
    trials: usize,
    seed: u64,
) -> Result<WeakNormEstimate> {
    let (_, top) = top_singular_pair(family)?;
    let dim = family.dim();
    let objective = |u: &[Complex64]| lq_norm((&family.rows * DVector::from_column_slice(u)).iter().map(|z| z.norm()), Exponent::Finite(q));

    let mut members: Vec<(f64, Vec<Complex64>)> = family
        .rows
        .row_iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter_map(|row| {
            let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            (norm > 0.0).then(|| {
                let u: Vec<Complex64> = row.iter().map(|z| z.conj() / norm).collect();
                (objective(&u), u)
            })
        })
        .collect();
    // stable, so ties keep family order
    members.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut starts: Vec<Vec<Complex64>> = Vec::with_capacity(1 + 2 * trials);
    starts.push(top);
    starts.extend(members.into_iter().take(trials).map(|(_, u)| u));
    for t in 0..trials {
        let mut rng = rng_from_seed(derive_seed(seed, t as u64));
        starts.push(complex_unit_vector(&mut rng, dim));
    }

    let mut screened: Vec<(f64, Vec<Complex64>)> =
        starts.into_par_iter().map(|u| ascend(family, u, q, SCREEN_STEPS)).collect();
    screened.sort_by(|a, b| b.0.total_cmp(&a.0));
    screened.truncate(FINALISTS);
    let (_, witness) = screened
        .into_par_iter()
        .map(|(_, u)| ascend(family, u, q, ASCENT_MAX_STEPS))
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |best, cur| if cur.0 > best.0 { cur } else { best });
    let lower = weak_objective(family, &witness, Exponent::Finite(q))?;
    Ok(WeakNormEstimate { lower, witness })
}

const ASCENT_TOL: f64 = 1e-10;
const ASCENT_MAX_STEPS: usize = 2000;
const SCREEN_STEPS: usize = 25;
const FINALISTS: usize = 4;

fn ascend(family: &VectorFamily, start: Vec<Complex64>, q: f64, max_steps: usize) -> (f64, Vec<Complex64>) {
    let m = &family.rows;
    let mut u = DVector::from_vec(start);
    let mut y = m * &u;
    let mut value = lq_norm(y.iter().map(|z| z.norm()), Exponent::Finite(q));
    for _ in 0..max_steps {
        let scale = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            break;
        }
        let g = y.map(|z| {
            let r = z.norm() / scale;
            if r == 0.0 { Complex64::ZERO } else { (z / scale) * r.powf(q - 2.0) }
        });
        let w = m.ad_mul(&g);
        let norm = w.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        let next = w / Complex64::new(norm, 0.0);
        let next_y = m * &next;
        let next_value = lq_norm(next_y.iter().map(|z| z.norm()), Exponent::Finite(q));
        if !(next_value > value) {
            break;
        }
        let gain = (next_value - value) / next_value;
        u = next;
        y = next_y;
        value = next_value;
        if gain < ASCENT_TOL {
            break;
        }
    }
    (value, u.iter().copied().collect())
}

/// Weak norm for any exponent, with a flag telling whether the value is exact.
pub fn weak_norm(family: &VectorFamily, q: Exponent, trials: usize, seed: u64) -> Result<(f64, bool)> {
    match q {
        Exponent::Infinite => Ok((weak_norm_inf(family)?, true)),
        Exponent::Finite(2.0) => Ok((weak_norm_2(family)?, true)),
        Exponent::Finite(x) if x > 0.0 && x.is_finite() => {
            Ok((ascent_lower_bound(family, x, trials.max(1), seed)?.lower, false))
        }
        Exponent::Finite(x) => Err(Error::InadmissibleExponents(format!("weak norm exponent {x}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inf_norm_of_single_vector() {
        let f = VectorFamily::from_real_rows(&[&[3.0, 4.0]]).unwrap();
        assert_eq!(weak_norm_inf(&f).unwrap(), 5.0);
    }

    #[test]
    fn basis_has_unit_weak_norms() {
        let f = VectorFamily::canonical_basis(6).unwrap();
        assert_eq!(weak_norm_inf(&f).unwrap(), 1.0);
        assert!((weak_norm_2(&f).unwrap() - 1.0).abs() < 1e-14);
        for q in [2.5, 3.0, 4.0, 8.0] {
            let est = weak_norm_q_estimate(&f, q, 4, 11).unwrap();
            assert!((est.lower - 1.0).abs() < 1e-12, "q={q}: {}", est.lower);
        }
    }

    #[test]
    fn duplicated_vector() {
        let f = VectorFamily::from_real_rows(&[&[1.0, 2.0, 2.0], &[1.0, 2.0, 2.0]]).unwrap();
        assert!((weak_norm_2(&f).unwrap() - 3.0 * 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn empty_family_rejected() {
        let f = VectorFamily::with_dim(vec![], 3).unwrap();
        assert!(matches!(weak_norm_inf(&f), Err(Error::EmptyFamily)));
        assert!(matches!(weak_norm_2(&f), Err(Error::EmptyFamily)));
        assert!(VectorFamily::from_rows(vec![]).is_err());
        assert!(VectorFamily::with_dim(vec![vec![Complex64::ZERO; 2]], 3).is_err());
    }

    #[test]
    fn estimator_preconditions() {
        let f = VectorFamily::canonical_basis(2).unwrap();
        assert!(weak_norm_q_estimate(&f, 1.5, 3, 0).is_err());
        assert!(weak_norm_q_estimate(&f, f64::INFINITY, 3, 0).is_err());
        assert!(weak_norm_q_estimate(&f, 3.0, 0, 0).is_err());
    }

    #[test]
    fn single_vector_any_q() {
        let f = VectorFamily::from_real_rows(&[&[1.0, -2.0, 2.0]]).unwrap();
        for q in [2.0, 3.0, 7.5] {
            let est = weak_norm_q_estimate(&f, q, 2, 5).unwrap();
            assert!((est.lower - 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn push_zero_keeps_dimension() {
        let mut f = VectorFamily::canonical_basis(3).unwrap();
        f.push_zero();
        assert_eq!(f.len(), 4);
        assert_eq!(f.vector(3), vec![Complex64::ZERO; 3]);
    }
}
