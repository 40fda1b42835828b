//! Lorentz sequence spaces `l_{p,q}` over finite sequences.
//!
//! All sequences are finite truncations. The quasinorm of a sequence is
//!
//! ```text
//! ||a||_{p,q} = ( sum_n a*_n^q n^{q/p - 1} )^{1/q}     (q < inf)
//! ||a||_{p,inf} = sup_n a*_n n^{1/p}
//! ```
//!
//! where `a*` is the nonincreasing rearrangement of `|a|`. Sums are evaluated
//! in log space because `p, q < 1` produce weights far outside the `f64` range.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exponent in `(0, inf]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    /// Hoelder conjugate `p' = p/(p-1)` of `p >= 1`, with `1' = inf`.
    pub fn conjugate_of(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InadmissibleExponents(format!("conjugate of p = {p} requires p >= 1")));
        }
        if p == 1.0 {
            Ok(Self::Infinite)
        } else {
            Ok(Self::Finite(p / (p - 1.0)))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinite)
    }

    /// `1/q`, zero for `q = inf`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Finite(q) => 1.0 / q,
            Self::Infinite => 0.0,
        }
    }

    pub fn is_valid(self) -> bool {
        match self {
            Self::Finite(q) => q > 0.0 && q.is_finite(),
            Self::Infinite => true,
        }
    }

    /// True for the exponents whose weak norms are computed exactly (2 and inf).
    pub fn is_exact_weak(self) -> bool {
        matches!(self, Self::Infinite) || self == Self::Finite(2.0)
    }
}

impl From<f64> for Exponent {
    fn from(q: f64) -> Self {
        if q == f64::INFINITY {
            Self::Infinite
        } else {
            Self::Finite(q)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(q) => write!(f, "{q}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(q) => s.serialize_f64(*q),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(q) => Ok(Self::Finite(q)),
            Repr::Text(t) if t == "inf" => Ok(Self::Infinite),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad exponent {t:?}"))),
        }
    }
}

/// Exponents `(p, q)` of a Lorentz space `l_{p,q}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzParams {
    pub p: f64,
    pub q: Exponent,
}

impl LorentzParams {
    pub fn new(p: f64, q: impl Into<Exponent>) -> Result<Self> {
        let q = q.into();
        if !(p > 0.0 && p.is_finite()) || !q.is_valid() {
            return Err(Error::InvalidParams(format!("p = {p}, q = {q}")));
        }
        Ok(Self { p, q })
    }

    /// The diagonal case `l_{p,p} = l_p`.
    pub fn lp(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    /// Constant `C` in `||x + y|| <= C (||x|| + ||y||)`.
    ///
    /// Follows from `(x+y)*_{2n-1} <= x*_n + y*_n` and pairing the indices
    /// `2n-1, 2n`: `C = max(2^{1/q}, 2^{1/p}) * max(1, 2^{1/q - 1})`.
    pub fn triangle_constant(&self) -> f64 {
        let inv_q = self.q.reciprocal();
        let inv_p = 1.0 / self.p;
        2f64.powf(inv_q.max(inv_p)) * 2f64.powf((inv_q - 1.0).max(0.0))
    }
}

/// Largest admissible sequence length.
pub const DEFAULT_MAX_LEN: usize = 1 << 20;

/// A finite sequence of finite complex scalars.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScalarSequence {
    entries: Vec<Complex64>,
}

impl ScalarSequence {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        Self::with_max_len(entries, DEFAULT_MAX_LEN)
    }

    pub fn with_max_len(entries: Vec<Complex64>, max: usize) -> Result<Self> {
        if entries.len() > max {
            return Err(Error::TooLong { len: entries.len(), max });
        }
        if let Some(index) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.norm()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| *z == Complex64::ZERO)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { entries: self.entries.iter().map(|z| z * c).collect() }
    }

    pub fn push_zero(&mut self) {
        self.entries.push(Complex64::ZERO);
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum ScalarRepr {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Complex64> for ScalarRepr {
    fn from(z: Complex64) -> Self {
        if z.im == 0.0 {
            Self::Real(z.re)
        } else {
            Self::Complex([z.re, z.im])
        }
    }
}

impl From<ScalarRepr> for Complex64 {
    fn from(r: ScalarRepr) -> Self {
        match r {
            ScalarRepr::Real(x) => Complex64::new(x, 0.0),
            ScalarRepr::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

impl Serialize for ScalarSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.entries.iter().map(|&z| ScalarRepr::from(z)))
    }
}

impl<'de> Deserialize<'de> for ScalarSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<ScalarRepr>::deserialize(d)?;
        Self::new(raw.into_iter().map(Complex64::from).collect()).map_err(serde::de::Error::custom)
    }
}

/// Indices that sort `|entries|` nonincreasingly; ties keep input order.
pub(crate) fn rearrangement_order(moduli: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..moduli.len()).collect();
    order.sort_by(|&i, &j| moduli[j].total_cmp(&moduli[i]));
    order
}

pub(crate) fn rearranged_moduli(moduli: &[f64]) -> Vec<f64> {
    let mut sorted = moduli.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted
}

/// Nonincreasing rearrangement `a*` of the moduli of `seq`.
pub fn decreasing_rearrangement(seq: &ScalarSequence) -> ScalarSequence {
    let sorted = rearranged_moduli(&seq.moduli());
    ScalarSequence { entries: sorted.into_iter().map(|x| Complex64::new(x, 0.0)).collect() }
}

/// Lorentz quasinorm `||seq||_{p,q}`.
pub fn lorentz_quasinorm(seq: &ScalarSequence, params: LorentzParams) -> Result<f64> {
    quasinorm_of_moduli(&seq.moduli(), params)
}

/// Same as [`lorentz_quasinorm`] for a list of nonnegative moduli in any order.
pub fn quasinorm_of_moduli(moduli: &[f64], params: LorentzParams) -> Result<f64> {
    if !(params.p > 0.0) || !params.q.is_valid() {
        return Err(Error::InvalidParams(format!("p = {}, q = {}", params.p, params.q)));
    }
    let sorted = rearranged_moduli(moduli);
    let head = match sorted.first() {
        Some(&h) if h > 0.0 => h,
        _ => return Ok(0.0),
    };
    let nonzero = sorted.iter().take_while(|&&a| a > 0.0).count();
    let log_head = head.ln();

    let log_value = match params.q {
        Exponent::Infinite => {
            let inv_p = 1.0 / params.p;
            let max = (0..nonzero)
                .map(|i| (sorted[i] / head).ln() + inv_p * ((i + 1) as f64).ln())
                .fold(f64::NEG_INFINITY, f64::max);
            log_head + max
        }
        Exponent::Finite(q) => {
            let weight = q / params.p - 1.0;
            let logs: Vec<f64> = (0..nonzero)
                .map(|i| q * (sorted[i] / head).ln() + weight * ((i + 1) as f64).ln())
                .collect();
            let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let sum = neumaier_sum(logs.iter().map(|&t| (t - shift).exp()));
            log_head + (shift + sum.ln()) / q
        }
    };
    let value = log_value.exp();
    if !value.is_finite() {
        return Err(Error::OutOfRange { log_value });
    }
    Ok(value)
}

pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Factorization `d = alpha * beta` with `alpha` in `l_1` and `beta` decaying
/// faster than `k^{-1/q}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorPair {
    pub alpha: ScalarSequence,
    pub beta: ScalarSequence,
    pub q: f64,
    /// `S = sum_k d*_k k^{1/q}`; the construction guarantees `sum |alpha_k| <= 2 S`.
    pub mass: f64,
}

impl FactorPair {
    /// `sum_k |alpha_k|`.
    pub fn alpha_l1(&self) -> f64 {
        neumaier_sum(self.alpha.entries().iter().map(|z| z.norm()))
    }

    /// `beta*_k k^{1/q}` for `k = 1..N`.
    pub fn weighted_beta_profile(&self) -> Vec<f64> {
        rearranged_moduli(&self.beta.moduli())
            .into_iter()
            .enumerate()
            .map(|(i, b)| b * ((i + 1) as f64).powf(1.0 / self.q))
            .collect()
    }

    /// Largest `|alpha_k beta_k - d_k|`.
    pub fn reconstruction_error(&self, d: &ScalarSequence) -> f64 {
        self.alpha
            .entries()
            .iter()
            .zip(self.beta.entries())
            .zip(d.entries())
            .map(|((a, b), d)| (a * b - d).norm())
            .fold(0.0, f64::max)
    }
}

/// Splits `d` into `alpha_k beta_k = d_k` with the tail-square-root weights
/// `eps_k = sqrt(r_k / S)`, where `a_k = d*_k k^{1/q}` and `r_k = sum_{j>=k} a_j`.
///
/// Then `alpha_k = a_k / eps_k` (in rearranged order) and `beta_k = eps_k / k^{1/q}`.
/// Each `alpha_k` is finally adjusted by a few ulps (nudging `beta_k` if needed)
/// so that the floating-point product reproduces `d_k` bit for bit.
pub fn factor_l1_lqinf(d: &ScalarSequence, q: f64) -> Result<FactorPair> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidParams(format!("factorization exponent q = {q}")));
    }
    if d.is_zero() {
        return Err(Error::ZeroSequence);
    }
    let n = d.len();
    let moduli = d.moduli();
    let order = rearrangement_order(&moduli);
    let inv_q = 1.0 / q;
    let weights: Vec<f64> = (1..=n).map(|k| (k as f64).powf(inv_q)).collect();

    let a: Vec<f64> = order.iter().zip(&weights).map(|(&i, w)| moduli[i] * w).collect();
    if let Some(bad) = a.iter().find(|x| !x.is_finite()) {
        return Err(Error::OutOfRange { log_value: bad.ln() });
    }
    let mut tails = vec![0.0; n + 1];
    for k in (0..n).rev() {
        tails[k] = tails[k + 1] + a[k];
    }
    let mass = tails[0];

    let mut alpha = vec![Complex64::ZERO; n];
    let mut beta = vec![Complex64::ZERO; n];
    let mut prev_beta = f64::INFINITY;
    let mut prev_weighted = f64::INFINITY;
    for (k, &idx) in order.iter().enumerate() {
        let eps = (tails[k] / mass).sqrt();
        let w = weights[k];
        // keeps beta decreasing and beta_k k^{1/q} nonincreasing after rounding
        let admissible = |b: f64| b <= prev_beta && b * w <= prev_weighted;
        let (al, be) = exact_split(d.entries()[idx], eps / w, admissible);
        alpha[idx] = al;
        beta[idx] = Complex64::new(be, 0.0);
        prev_beta = be;
        prev_weighted = be * w;
    }
    Ok(FactorPair {
        alpha: ScalarSequence { entries: alpha },
        beta: ScalarSequence { entries: beta },
        q,
        mass,
    })
}

/// Finds `(alpha, beta')` with `beta'` admissible, within `2^16` ulps of
/// `beta`, and `alpha * beta' == target` exactly in floating point.
fn exact_split(target: Complex64, beta: f64, admissible: impl Fn(f64) -> bool) -> (Complex64, f64) {
    if beta == 0.0 {
        return (Complex64::ZERO, 0.0);
    }
    // Neighbouring ulps shift the quotient by nearly whole ulps when the
    // mantissas of alpha and beta are close, so wider strides are mixed in.
    let near = (1..=32i64).flat_map(|k| [-k, k]);
    let far = (1..=1771i64).flat_map(|m| [-37 * m, 37 * m]);
    let bits = beta.to_bits() as i64;
    for offset in std::iter::once(0).chain(near).chain(far) {
        let candidate = f64::from_bits((bits + offset) as u64);
        if !(candidate > 0.0 && candidate.is_finite()) || !admissible(candidate) {
            continue;
        }
        if let (Some(re), Some(im)) =
            (exact_quotient(target.re, candidate), exact_quotient(target.im, candidate))
        {
            return (Complex64::new(re, im), candidate);
        }
    }
    let mut fallback = beta;
    while fallback > 0.0 && !admissible(fallback) {
        fallback = fallback.next_down();
    }
    (target / fallback, fallback)
}

/// Some `x` near `target / beta` with `x * beta == target`, if one exists.
fn exact_quotient(target: f64, beta: f64) -> Option<f64> {
    if target == 0.0 {
        return Some(0.0);
    }
    let base = target / beta;
    let mut up = base;
    let mut down = base;
    for _ in 0..4 {
        if up * beta == target {
            return Some(up);
        }
        if down * beta == target {
            return Some(down);
        }
        up = up.next_up();
        down = down.next_down();
    }
    None
}
