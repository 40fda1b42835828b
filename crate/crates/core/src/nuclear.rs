//! Finite nuclear representations `T = sum_k lambda_k x'_k (x) x_k`, their
//! assembled matrices and nuclear traces, and representation-wise upper
//! bounds for the quasinorms `||.||_{r,p,q}` and `||.||_{(r,s),p}`.
//!
//! The quasinorms are infima over all representations of an operator; here
//! only the value of one given representation is computed, which bounds the
//! infimum from above whenever both weak-norm factors are exact.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::{lorentz_quasinorm, Exponent, LorentzParams, ScalarSequence};
use crate::matrix::DenseMatrix;
use crate::sampling::{derive_seed, real_unit_vector, rng_from_seed};
use crate::weaknorm::{weak_norm, VectorFamily};

/// `x -> sum_k lambda_k <x'_k, x> x_k` with the bilinear pairing `<u, v> = sum_j u_j v_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRep", into = "RawRep")]
pub struct NuclearRep {
    lambda: ScalarSequence,
    functionals: VectorFamily,
    vectors: VectorFamily,
}

#[derive(Serialize, Deserialize)]
struct RawRep {
    lambda: ScalarSequence,
    functionals: VectorFamily,
    vectors: VectorFamily,
}

impl TryFrom<RawRep> for NuclearRep {
    type Error = Error;

    fn try_from(raw: RawRep) -> Result<Self> {
        Self::new(raw.lambda, raw.functionals, raw.vectors)
    }
}

impl From<NuclearRep> for RawRep {
    fn from(rep: NuclearRep) -> Self {
        Self { lambda: rep.lambda, functionals: rep.functionals, vectors: rep.vectors }
    }
}

impl NuclearRep {
    pub fn new(lambda: ScalarSequence, functionals: VectorFamily, vectors: VectorFamily) -> Result<Self> {
        let n = lambda.len();
        for family in [&functionals, &vectors] {
            if family.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: family.len() });
            }
        }
        if functionals.dim() != vectors.dim() {
            return Err(Error::DimensionMismatch { expected: functionals.dim(), found: vectors.dim() });
        }
        Ok(Self { lambda, functionals, vectors })
    }

    /// `sum_k lambda_k e_k (x) e_k` on the canonical basis of `C^N`.
    pub fn diagonal(lambda: &[Complex64]) -> Result<Self> {
        let n = lambda.len();
        Self::new(
            ScalarSequence::new(lambda.to_vec())?,
            VectorFamily::canonical_basis(n)?,
            VectorFamily::canonical_basis(n)?,
        )
    }

    pub fn lambda(&self) -> &ScalarSequence {
        &self.lambda
    }

    pub fn functionals(&self) -> &VectorFamily {
        &self.functionals
    }

    pub fn vectors(&self) -> &VectorFamily {
        &self.vectors
    }

    /// Number of terms `N`.
    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn with_lambda(&self, lambda: ScalarSequence) -> Result<Self> {
        Self::new(lambda, self.functionals.clone(), self.vectors.clone())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { lambda: self.lambda.scaled(c), ..self.clone() }
    }

    /// Appends the term `0 * 0 (x) 0`.
    pub fn push_zero_term(&mut self) {
        self.lambda.push_zero();
        self.functionals.push_zero();
        self.vectors.push_zero();
    }

    /// Representation of `T_1 + T_2` obtained by listing both term sequences.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let lambda = [self.lambda.entries(), other.lambda.entries()].concat();
        let stack = |a: &VectorFamily, b: &VectorFamily| {
            let mut m = DMatrix::zeros(a.len() + b.len(), a.dim());
            m.rows_mut(0, a.len()).copy_from(a.as_matrix());
            m.rows_mut(a.len(), b.len()).copy_from(b.as_matrix());
            VectorFamily::from_matrix(m)
        };
        Self::new(
            ScalarSequence::new(lambda)?,
            stack(&self.functionals, &other.functionals)?,
            stack(&self.vectors, &other.vectors)?,
        )
    }
}

/// The `d x d` matrix `sum_k lambda_k x_k x'_k^T`.
pub fn assemble(rep: &NuclearRep) -> DenseMatrix {
    let mut weighted = rep.functionals.as_matrix().clone();
    for (k, &l) in rep.lambda.entries().iter().enumerate() {
        for z in weighted.row_mut(k).iter_mut() {
            *z *= l;
        }
    }
    DenseMatrix::new(rep.vectors.as_matrix().transpose() * weighted)
        .expect("product of finite factors is square and finite")
}

/// `sum_k lambda_k <x'_k, x_k>`.
pub fn nuclear_trace(rep: &NuclearRep) -> Complex64 {
    let f = rep.functionals.as_matrix();
    let x = rep.vectors.as_matrix();
    rep.lambda
        .entries()
        .iter()
        .enumerate()
        .map(|(k, &l)| l * f.row(k).iter().zip(x.row(k).iter()).map(|(a, b)| a * b).sum::<Complex64>())
        .sum()
}

/// Which quasinorm an estimate refers to, with its exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuasinormKind {
    /// `||lambda||_r * eps_p(x') * eps_q(x)`.
    Rpq { r: f64, p: Exponent, q: Exponent },
    /// `||lambda||_{(r,s)} * eps_inf(x') * eps_{p'}(x)`.
    LorentzLapreste { r: f64, s: f64, p: f64 },
}

impl QuasinormKind {
    pub fn check(&self) -> Result<()> {
        match *self {
            Self::Rpq { r, p, q } => {
                if !(r > 0.0 && r <= 1.0) || !p.is_valid() || !q.is_valid() {
                    return Err(Error::InadmissibleExponents(format!(
                        "r,p,q quasinorm needs 0 < r <= 1 and p, q in (0, inf]; got r={r}, p={p}, q={q}"
                    )));
                }
            }
            Self::LorentzLapreste { r, s, p } => {
                if !(r > 0.0 && r <= 1.0) || !(s > 0.0 && s <= 1.0) || !(1.0..=2.0).contains(&p) {
                    return Err(Error::InadmissibleExponents(format!(
                        "(r,s),p quasinorm needs 0 < r,s <= 1 and 1 <= p <= 2; got r={r}, s={s}, p={p}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Exponents applied to the functionals and to the vectors.
    pub(crate) fn weak_exponents(&self) -> (Exponent, Exponent) {
        match *self {
            Self::Rpq { p, q, .. } => (p, q),
            Self::LorentzLapreste { p, .. } => {
                (Exponent::Infinite, Exponent::conjugate_of(p).expect("checked p >= 1"))
            }
        }
    }

    pub(crate) fn coefficient_params(&self) -> LorentzParams {
        match *self {
            Self::Rpq { r, .. } => LorentzParams { p: r, q: Exponent::Finite(r) },
            Self::LorentzLapreste { r, s, .. } => LorentzParams { p: r, q: Exponent::Finite(s) },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasinormEstimate {
    pub value: f64,
    #[serde(flatten)]
    pub kind: QuasinormKind,
    /// Set when both weak-norm factors are exact, so `value` is a true upper
    /// bound on the quasinorm of the assembled operator.
    pub certified: bool,
}

/// Trial count and seed for the weak-norm estimator used by non-exact exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EstimatorSettings {
    pub trials: usize,
    pub seed: u64,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self { trials: 16, seed: 0x5eed }
    }
}

pub fn quasinorm_rpq(rep: &NuclearRep, r: f64, p: Exponent, q: Exponent) -> Result<QuasinormEstimate> {
    quasinorm_estimate(rep, QuasinormKind::Rpq { r, p, q }, EstimatorSettings::default())
}

pub fn quasinorm_lorentz_lapreste(rep: &NuclearRep, r: f64, s: f64, p: f64) -> Result<QuasinormEstimate> {
    quasinorm_estimate(rep, QuasinormKind::LorentzLapreste { r, s, p }, EstimatorSettings::default())
}

/// Representation-wise value of the quasinorm `kind`.
pub fn quasinorm_estimate(
    rep: &NuclearRep,
    kind: QuasinormKind,
    settings: EstimatorSettings,
) -> Result<QuasinormEstimate> {
    kind.check()?;
    let (fp, vp) = kind.weak_exponents();
    let certified = fp.is_exact_weak() && vp.is_exact_weak();
    if rep.is_empty() {
        return Ok(QuasinormEstimate { value: 0.0, kind, certified });
    }
    let coeff = lorentz_quasinorm(&rep.lambda, kind.coefficient_params())?;
    let (ef, _) = weak_norm(&rep.functionals, fp, settings.trials, settings.seed)?;
    let (ev, _) = weak_norm(&rep.vectors, vp, settings.trials, derive_seed(settings.seed, 1))?;
    Ok(QuasinormEstimate { value: coeff * ef * ev, kind, certified })
}

/// Coefficient profile of [`random_rep`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decay", rename_all = "snake_case")]
pub enum Decay {
    /// `lambda_k = k^{-1/r} (1 + ln k)^{-|1/s - 1/r|}`.
    Lorentz { r: f64, s: f64 },
    /// `lambda_k = k^{-exponent}`.
    Power { exponent: f64 },
}

impl Decay {
    pub fn coefficient(&self, k: usize) -> f64 {
        let k = k as f64;
        match *self {
            Self::Lorentz { r, s } => k.powf(-1.0 / r) * (1.0 + k.ln()).powf(-(1.0 / s - 1.0 / r).abs()),
            Self::Power { exponent } => k.powf(-exponent),
        }
    }

    pub fn coefficients(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.coefficient(k)).collect()
    }

    fn check(&self) -> Result<()> {
        let ok = match *self {
            Self::Lorentz { r, s } => r > 0.0 && s > 0.0 && r.is_finite() && s.is_finite(),
            Self::Power { exponent } => exponent.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad decay profile {self:?}")))
        }
    }
}

/// Random rank-`n` representation in dimension `d`: coefficients from `decay`,
/// functionals and vectors independent and uniform on the unit sphere.
pub fn random_rep(d: usize, n: usize, decay: Decay, seed: u64) -> Result<NuclearRep> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("random_rep needs d, N >= 1 (got d={d}, N={n})")));
    }
    decay.check()?;
    let lambda = ScalarSequence::from_real(&decay.coefficients(n))?;
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let functionals = (0..n).map(|_| real_unit_vector(&mut rng, d)).collect();
    let mut rng = rng_from_seed(derive_seed(seed, 1));
    let vectors = (0..n).map(|_| real_unit_vector(&mut rng, d)).collect();
    NuclearRep::new(lambda, VectorFamily::with_dim(functionals, d)?, VectorFamily::with_dim(vectors, d)?)
}
