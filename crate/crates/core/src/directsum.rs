//! `l_p` direct sums of finite blocks, `T = sum_n j_n T_n i_n`.
//!
//! The sum space carries `||(x_n)|| = || (|x_n|)_n ||_{l_p}` with Euclidean
//! block norms, so every inclusion `i_n` and projection `j_n` has norm 1.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::{Exponent, ScalarSequence};
use crate::matrix::DenseMatrix;
use crate::nuclear::{quasinorm_estimate, EstimatorSettings, NuclearRep, QuasinormKind};
use crate::spectral::{eigenvalues, multiset_distance, MAX_ORDER};
use crate::weaknorm::{weak_norm, VectorFamily};

#[derive(Clone, Debug, PartialEq)]
pub struct DirectSumOperator {
    blocks: Vec<DenseMatrix>,
    p: Exponent,
    offsets: Vec<usize>,
}

/// Block-diagonal operator on the `l_p` sum of the blocks' spaces.
pub fn direct_sum(blocks: Vec<DenseMatrix>, p: Exponent) -> Result<DirectSumOperator> {
    if blocks.is_empty() {
        return Err(Error::InvalidArgument("direct sum of an empty block list".into()));
    }
    match p {
        Exponent::Finite(x) if !(x >= 1.0 && x.is_finite()) => {
            return Err(Error::InadmissibleExponents(format!("direct sums need 1 <= p <= inf, got {x}")));
        }
        _ => {}
    }
    if blocks.iter().any(|b| b.order() == 0) {
        return Err(Error::InvalidArgument("direct-sum blocks must have positive order".into()));
    }
    let mut offsets = Vec::with_capacity(blocks.len() + 1);
    offsets.push(0);
    for b in &blocks {
        offsets.push(offsets.last().unwrap() + b.order());
    }
    Ok(DirectSumOperator { blocks, p, offsets })
}

impl DirectSumOperator {
    pub fn blocks(&self) -> &[DenseMatrix] {
        &self.blocks
    }

    /// Number of blocks kept (the truncation length of the countable sum).
    pub fn truncation(&self) -> usize {
        self.blocks.len()
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn total_order(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn assemble(&self) -> DenseMatrix {
        let n = self.total_order();
        let mut m = DMatrix::zeros(n, n);
        for (b, &off) in self.blocks.iter().zip(&self.offsets) {
            m.view_mut((off, off), (b.order(), b.order())).copy_from(b.as_matrix());
        }
        DenseMatrix::new(m).expect("block diagonal of square finite blocks")
    }

    fn check_block(&self, n: usize) -> Result<()> {
        if n >= self.blocks.len() {
            return Err(Error::InvalidArgument(format!("block {n} out of range ({} blocks)", self.blocks.len())));
        }
        Ok(())
    }

    /// `i_n`: coordinate injection of block `n` (total x d_n).
    pub fn inclusion(&self, n: usize) -> Result<DMatrix<Complex64>> {
        self.check_block(n)?;
        let (off, d) = (self.offsets[n], self.blocks[n].order());
        Ok(DMatrix::from_fn(self.total_order(), d, |i, j| {
            if i == off + j { Complex64::new(1.0, 0.0) } else { Complex64::ZERO }
        }))
    }

    /// `j_n`: coordinate restriction to block `n` (d_n x total).
    pub fn projection(&self, n: usize) -> Result<DMatrix<Complex64>> {
        Ok(self.inclusion(n)?.transpose())
    }

    /// `j_n T i_n`.
    pub fn extract_block(&self, n: usize) -> Result<DenseMatrix> {
        let t = self.assemble();
        DenseMatrix::new(self.projection(n)? * t.as_matrix() * self.inclusion(n)?)
    }

    /// Norm of `x` in the `l_p` sum: the `l_p` norm of the Euclidean block norms.
    pub fn sum_norm(&self, x: &[Complex64]) -> Result<f64> {
        if x.len() != self.total_order() {
            return Err(Error::DimensionMismatch { expected: self.total_order(), found: x.len() });
        }
        let norms = self.offsets.windows(2).map(|w| {
            x[w[0]..w[1]].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
        });
        Ok(match self.p {
            Exponent::Infinite => norms.fold(0.0, f64::max),
            Exponent::Finite(p) => norms.map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumUnionReport {
    pub max_diff: f64,
    pub total_order: usize,
    pub blocks: usize,
    pub pass: bool,
}

/// Tolerance for matching the assembled spectrum with the union of block spectra.
pub const UNION_TOLERANCE: f64 = 1e-7;

/// Compares the spectrum of the assembled operator with the union of the block spectra.
pub fn spectrum_union_check(ds: &DirectSumOperator) -> Result<SpectrumUnionReport> {
    if ds.total_order() > MAX_ORDER {
        return Err(Error::OrderTooLarge { order: ds.total_order(), limit: MAX_ORDER });
    }
    let whole = eigenvalues(&ds.assemble())?;
    let mut union = Vec::with_capacity(ds.total_order());
    for b in &ds.blocks {
        union.extend_from_slice(eigenvalues(b)?.eigenvalues());
    }
    let max_diff = multiset_distance(whole.eigenvalues(), &union).unwrap_or(f64::INFINITY);
    Ok(SpectrumUnionReport {
        max_diff,
        total_order: ds.total_order(),
        blocks: ds.truncation(),
        pass: max_diff <= UNION_TOLERANCE,
    })
}

/// Both sides of `||sum_n w_n j_n T_n i_n|| <= sum_k nu^k ||w_k T_k||`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummedBoundReport {
    /// Representation-wise quasinorm of the concatenated, block-embedded representation.
    pub lhs: f64,
    /// `sum_k nu^k estimate_k`.
    pub bound: f64,
    /// Quasi-triangle constant of the coefficient quasinorm.
    pub nu: f64,
    pub estimates: Vec<f64>,
    pub holds: bool,
    pub certified: bool,
    pub truncation: usize,
}

/// Quasi-triangle constant of the coefficient quasinorm of `kind`:
/// `2^{1/r - 1}` for `l_r`, the Lorentz constant for `l_{r,s}`.
pub fn triangle_constant(kind: &QuasinormKind) -> f64 {
    match *kind {
        QuasinormKind::Rpq { r, .. } => 2f64.powf(1.0 / r - 1.0).max(1.0),
        QuasinormKind::LorentzLapreste { .. } => kind.coefficient_params().triangle_constant(),
    }
}

/// Compares the quasinorm estimate of a block-diagonal sum of representations
/// with the iterated quasi-triangle bound.
///
/// Each representation is first rescaled so that both weak-norm factors equal
/// one (its value is unchanged), then embedded into its own block of the sum
/// space. Only kinds whose weak exponents are at least 2 are accepted, since
/// for those the weak norm of a block-diagonal family is the largest block value.
pub fn summed_quasinorm_bound(
    reps: &[NuclearRep],
    weights: &[Complex64],
    kind: QuasinormKind,
) -> Result<SummedBoundReport> {
    kind.check()?;
    if reps.is_empty() {
        return Err(Error::InvalidArgument("summed bound needs at least one representation".into()));
    }
    if weights.len() != reps.len() {
        return Err(Error::DimensionMismatch { expected: reps.len(), found: weights.len() });
    }
    let (fp, vp) = kind.weak_exponents();
    for e in [fp, vp] {
        if let Exponent::Finite(x) = e {
            if x < 2.0 {
                return Err(Error::InadmissibleExponents(format!(
                    "summed bound needs weak exponents >= 2, got {x}"
                )));
            }
        }
    }
    let settings = EstimatorSettings::default();
    let nu = triangle_constant(&kind);

    let mut estimates = Vec::with_capacity(reps.len());
    let mut certified = true;
    let mut normalized = Vec::with_capacity(reps.len());
    for (rep, &w) in reps.iter().zip(weights) {
        let weighted = rep.scaled(w);
        let est = quasinorm_estimate(&weighted, kind, settings)?;
        certified &= est.certified;
        estimates.push(est.value);
        normalized.push(normalize(&weighted, fp, vp, settings)?);
    }
    let bound = estimates.iter().enumerate().map(|(k, e)| nu.powi(k as i32 + 1) * e).sum();

    let total: usize = normalized.iter().map(NuclearRep::dim).sum();
    let mut lambda = Vec::new();
    let mut functionals = Vec::new();
    let mut vectors = Vec::new();
    let mut offset = 0;
    for rep in &normalized {
        lambda.extend_from_slice(rep.lambda().entries());
        for k in 0..rep.len() {
            functionals.push(embed(&rep.functionals().vector(k), offset, total));
            vectors.push(embed(&rep.vectors().vector(k), offset, total));
        }
        offset += rep.dim();
    }
    let joined = NuclearRep::new(
        ScalarSequence::new(lambda)?,
        VectorFamily::with_dim(functionals, total)?,
        VectorFamily::with_dim(vectors, total)?,
    )?;
    let lhs_est = quasinorm_estimate(&joined, kind, settings)?;
    certified &= lhs_est.certified;
    let lhs = lhs_est.value;
    Ok(SummedBoundReport {
        lhs,
        bound,
        nu,
        estimates,
        holds: lhs <= bound * (1.0 + 1e-12),
        certified,
        truncation: reps.len(),
    })
}

fn embed(v: &[Complex64], offset: usize, total: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; total];
    out[offset..offset + v.len()].copy_from_slice(v);
    out
}

fn normalize(rep: &NuclearRep, fp: Exponent, vp: Exponent, settings: EstimatorSettings) -> Result<NuclearRep> {
    if rep.is_empty() {
        return Ok(rep.clone());
    }
    let (ef, _) = weak_norm(rep.functionals(), fp, settings.trials, settings.seed)?;
    let (ev, _) = weak_norm(rep.vectors(), vp, settings.trials, settings.seed)?;
    if ef == 0.0 || ev == 0.0 {
        return Ok(rep.clone());
    }
    NuclearRep::new(
        rep.lambda().scaled(Complex64::new(ef * ev, 0.0)),
        rep.functionals().scaled(Complex64::new(1.0 / ef, 0.0)),
        rep.vectors().scaled(Complex64::new(1.0 / ev, 0.0)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::operator_norm;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn single_block_is_itself() {
        let b = DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let ds = direct_sum(vec![b.clone()], Exponent::Finite(2.0)).unwrap();
        assert_eq!(ds.assemble(), b);
        assert_eq!(ds.extract_block(0).unwrap(), b);
    }

    #[test]
    fn scalar_blocks_make_a_diagonal() {
        let ds = direct_sum(
            vec![DenseMatrix::diagonal(&[c(2.0)]), DenseMatrix::diagonal(&[c(-1.0)])],
            Exponent::Finite(1.0),
        )
        .unwrap();
        assert_eq!(ds.assemble(), DenseMatrix::diagonal(&[c(2.0), c(-1.0)]));
        let r = spectrum_union_check(&ds).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_diff, 0.0);
    }

    #[test]
    fn inclusions_and_projections_have_norm_one() {
        let ds = direct_sum(
            vec![DenseMatrix::identity(2), DenseMatrix::identity(3), DenseMatrix::identity(1)],
            Exponent::Infinite,
        )
        .unwrap();
        for n in 0..3 {
            assert!((operator_norm(&ds.inclusion(n).unwrap()) - 1.0).abs() < 1e-12);
            assert!((operator_norm(&ds.projection(n).unwrap()) - 1.0).abs() < 1e-12);
        }
        assert!(ds.inclusion(3).is_err());
    }

    #[test]
    fn sum_norm_of_block_vectors() {
        let ds = direct_sum(vec![DenseMatrix::identity(2), DenseMatrix::identity(1)], Exponent::Finite(1.0)).unwrap();
        let x = [c(3.0), c(4.0), c(-2.0)];
        assert!((ds.sum_norm(&x).unwrap() - 7.0).abs() < 1e-15);
        assert!(ds.sum_norm(&x[..2]).is_err());
    }

    #[test]
    fn invalid_sums_rejected() {
        assert!(direct_sum(vec![], Exponent::Finite(2.0)).is_err());
        assert!(direct_sum(vec![DenseMatrix::identity(1)], Exponent::Finite(0.5)).is_err());
        assert!(direct_sum(vec![DenseMatrix::zeros(0)], Exponent::Finite(1.0)).is_err());
    }

    #[test]
    fn single_rep_bound() {
        let rep = NuclearRep::diagonal(&[c(1.0), c(0.5)]).unwrap();
        let kind = QuasinormKind::Rpq { r: 0.5, p: Exponent::Infinite, q: Exponent::Finite(2.0) };
        let r = summed_quasinorm_bound(&[rep], &[c(1.0)], kind).unwrap();
        assert!((r.bound - r.nu * r.estimates[0]).abs() < 1e-15);
        assert!(r.holds);
        assert!(r.nu >= 1.0);
    }

    #[test]
    fn l1_coefficients_are_additive() {
        let a = NuclearRep::diagonal(&[c(2.0)]).unwrap();
        let b = NuclearRep::diagonal(&[c(3.0)]).unwrap();
        let kind = QuasinormKind::Rpq { r: 1.0, p: Exponent::Infinite, q: Exponent::Infinite };
        let r = summed_quasinorm_bound(&[a, b], &[c(1.0), c(1.0)], kind).unwrap();
        assert_eq!(r.nu, 1.0);
        assert!((r.lhs - 5.0).abs() < 1e-14);
        assert!((r.bound - 5.0).abs() < 1e-14);
        assert!(r.holds);
        assert_eq!(r.truncation, 2);
    }

    #[test]
    fn small_weak_exponents_rejected() {
        let a = NuclearRep::diagonal(&[c(1.0)]).unwrap();
        let kind = QuasinormKind::Rpq { r: 1.0, p: Exponent::Finite(1.5), q: Exponent::Infinite };
        assert!(summed_quasinorm_bound(std::slice::from_ref(&a), &[c(1.0)], kind).is_err());
        let kind = QuasinormKind::Rpq { r: 1.0, p: Exponent::Infinite, q: Exponent::Infinite };
        assert!(summed_quasinorm_bound(&[a], &[], kind).is_err());
    }
}
