//! Spectra of finite matrices: all eigenvalues with algebraic multiplicity,
//! spectral traces, and Lorentz quasinorms of eigenvalue sequences.

mod qr;

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lorentz::{quasinorm_of_moduli, LorentzParams};
use crate::matrix::DenseMatrix;

pub use qr::SWEEPS_PER_ORDER;

/// Largest matrix order accepted by [`eigenvalues`].
pub const MAX_ORDER: usize = 2048;

/// Eigenvalues with multiplicity, sorted by nonincreasing modulus and then by
/// ascending phase in `(-pi, pi]`.
///
/// Moduli are compared after rounding to `1e-12` of the largest modulus so that
/// numerically tied values (conjugate pairs of a real matrix) order by phase.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn from_unsorted(mut eigenvalues: Vec<Complex64>) -> Self {
        let scale = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let quantum = if scale > 0.0 { scale * 1e-12 } else { 1.0 };
        let key = |z: &Complex64| ((z.norm() / quantum).round(), phase(*z));
        eigenvalues.sort_by(|a, b| {
            let (ma, pa) = key(a);
            let (mb, pb) = key(b);
            mb.total_cmp(&ma).then(pa.total_cmp(&pb))
        });
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Matrix order the spectrum was computed for.
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.norm()).collect()
    }

    /// Largest modulus, 0 for the empty spectrum.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.first().map_or(0.0, |z| z.norm())
    }

    /// Eigenvalues whose modulus exceeds `threshold`.
    pub fn nonzero(&self, threshold: f64) -> Vec<Complex64> {
        self.eigenvalues.iter().copied().filter(|z| z.norm() > threshold).collect()
    }
}

fn phase(z: Complex64) -> f64 {
    if z == Complex64::ZERO {
        0.0
    } else {
        let a = z.arg();
        // arg is in [-pi, pi]; fold -pi onto pi
        if a == -std::f64::consts::PI { std::f64::consts::PI } else { a }
    }
}

impl Serialize for Spectrum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.eigenvalues.iter().map(|z| [z.re, z.im]))
    }
}

impl<'de> Deserialize<'de> for Spectrum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(Self::from_unsorted(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()))
    }
}

/// All eigenvalues of `m` with multiplicity.
///
/// Fails with [`Error::NoConvergence`] when the QR iteration exhausts its
/// budget of `100 * order` sweeps.
pub fn eigenvalues(m: &DenseMatrix) -> Result<Spectrum> {
    if m.order() > MAX_ORDER {
        return Err(Error::OrderTooLarge { order: m.order(), limit: MAX_ORDER });
    }
    Ok(Spectrum::from_unsorted(qr::eigenvalues_unsorted(m.as_matrix())?))
}

pub fn spectral_trace(s: &Spectrum) -> Complex64 {
    s.eigenvalues.iter().sum()
}

/// `||(|mu_k|)||_{p,q}`.
pub fn spectrum_lorentz_norm(s: &Spectrum, params: LorentzParams) -> Result<f64> {
    quasinorm_of_moduli(&s.moduli(), params)
}

/// Largest distance between paired elements of two multisets of equal size,
/// pairing greedily by nearest available neighbour in order of decreasing
/// modulus. `None` when the sizes differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut left: Vec<Complex64> = a.to_vec();
    left.sort_by(|x, y| y.norm().partial_cmp(&x.norm()).unwrap_or(Ordering::Equal));
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for z in left {
        let (j, dist) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, w)| (j, (z - w).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        used[j] = true;
        worst = worst.max(dist);
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_spectrum_sorted_by_modulus() {
        let m = DenseMatrix::diagonal(&[c(0.0, 0.0), c(1.0, 1.0), c(3.0, 0.0)]);
        let s = eigenvalues(&m).unwrap();
        assert_eq!(s.eigenvalues(), &[c(3.0, 0.0), c(1.0, 1.0), c(0.0, 0.0)]);
    }

    #[test]
    fn nilpotent_spectrum_is_zero() {
        let m = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let s = eigenvalues(&m).unwrap();
        assert_eq!(s.eigenvalues(), &[Complex64::ZERO, Complex64::ZERO]);
    }

    #[test]
    fn rotation_has_conjugate_pair_in_phase_order() {
        let m = DenseMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        let s = eigenvalues(&m).unwrap();
        assert!((s.eigenvalues()[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((s.eigenvalues()[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn ties_sort_by_phase() {
        let s = Spectrum::from_unsorted(vec![c(-1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(0.0, -1.0)]);
        assert_eq!(s.eigenvalues(), &[c(0.0, -1.0), c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]);
    }

    #[test]
    fn trace_of_small_spectra() {
        let s = Spectrum::from_unsorted(vec![c(3.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(spectral_trace(&s), c(6.0, 0.0));
        assert_eq!(spectral_trace(&Spectrum::default()), Complex64::ZERO);
        assert_eq!(eigenvalues(&DenseMatrix::zeros(0)).unwrap().order(), 0);
    }

    #[test]
    fn lorentz_norm_of_spectrum() {
        let s = eigenvalues(&DenseMatrix::diagonal(&[c(1.0, 0.0), c(0.5, 0.0), c(0.25, 0.0)])).unwrap();
        let v = spectrum_lorentz_norm(&s, LorentzParams::lp(1.0).unwrap()).unwrap();
        assert!((v - 1.75).abs() < 1e-15);
        let zero = Spectrum::from_unsorted(vec![Complex64::ZERO; 4]);
        assert_eq!(spectrum_lorentz_norm(&zero, LorentzParams::lp(1.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn order_limit() {
        assert!(matches!(
            eigenvalues(&DenseMatrix::zeros(MAX_ORDER + 1)),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn multiset_distance_pairs_elements() {
        let a = [c(1.0, 0.0), c(2.0, 0.0)];
        let b = [c(2.0, 1e-9), c(1.0, 0.0)];
        assert!(multiset_distance(&a, &b).unwrap() <= 1e-9);
        assert!(multiset_distance(&a, &b[..1]).is_none());
    }

    #[test]
    fn json_pairs() {
        let s = Spectrum::from_unsorted(vec![c(1.0, 2.0), c(3.0, 0.0)]);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[[3.0,0.0],[1.0,2.0]]");
    }
}
