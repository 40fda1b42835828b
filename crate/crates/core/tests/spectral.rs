use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use stl_core::lorentz::LorentzParams;
use stl_core::sampling::{complex_gaussian_matrix, real_gaussian_matrix, rng_from_seed};
use stl_core::spectral::{eigenvalues, multiset_distance, spectral_trace, spectrum_lorentz_norm, Spectrum, MAX_ORDER};
use stl_core::{DenseMatrix, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gaussian(seed: u64, n: usize) -> DenseMatrix {
    let mut rng = rng_from_seed(seed);
    DenseMatrix::new(complex_gaussian_matrix(&mut rng, n, n)).unwrap()
}

fn assert_same_multiset(got: &[Complex64], expected: &[Complex64], tol: f64) {
    let d = multiset_distance(got, expected).expect("same size");
    assert!(d <= tol, "distance {d:e}\n got {got:?}\n expected {expected:?}");
}

#[test]
fn triangular_matrices_show_their_diagonal() {
    let mut rng = rng_from_seed(1);
    let mut m = complex_gaussian_matrix(&mut rng, 6, 6);
    for i in 0..6 {
        for j in 0..i {
            m[(i, j)] = Complex64::ZERO;
        }
    }
    let diag: Vec<Complex64> = (0..6).map(|i| m[(i, i)]).collect();
    let s = eigenvalues(&DenseMatrix::new(m).unwrap()).unwrap();
    assert_same_multiset(s.eigenvalues(), &diag, 1e-12);
}

#[test]
fn companion_matrix_roots() {
    // p(x) = prod (x - r_k); the companion matrix has exactly these eigenvalues
    let roots = [c(1.0, 0.0), c(-0.5, 0.5), c(-0.5, -0.5), c(0.0, 2.0), c(0.25, 0.0)];
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::ZERO; coeffs.len() + 1];
        for (i, a) in coeffs.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        coeffs = next;
    }
    let n = roots.len();
    let companion = DMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -coeffs[i]
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let s = eigenvalues(&DenseMatrix::new(companion).unwrap()).unwrap();
    assert_same_multiset(s.eigenvalues(), &roots, 1e-10);
}

#[test]
fn hermitian_spectra_match_a_symmetric_solver() {
    let mut rng = rng_from_seed(2);
    let a = complex_gaussian_matrix(&mut rng, 10, 10);
    let h = &a + a.adjoint();
    let expected: Vec<Complex64> = h.clone().symmetric_eigenvalues().iter().map(|&x| c(x, 0.0)).collect();
    let s = eigenvalues(&DenseMatrix::new(h).unwrap()).unwrap();
    assert_same_multiset(s.eigenvalues(), &expected, 1e-11);
}

#[test]
fn real_rotation_block() {
    let m = DenseMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
    let s = eigenvalues(&m).unwrap();
    assert_same_multiset(s.eigenvalues(), &[c(0.0, 1.0), c(0.0, -1.0)], 1e-14);
}

#[test]
fn repeated_and_defective_eigenvalues() {
    let jordan = DenseMatrix::from_real_rows(&[&[2.0, 1.0, 0.0], &[0.0, 2.0, 1.0], &[0.0, 0.0, 2.0]]).unwrap();
    let s = eigenvalues(&jordan).unwrap();
    assert!(s.eigenvalues().iter().all(|z| (z - c(2.0, 0.0)).norm() < 1e-12));
    let zero = eigenvalues(&DenseMatrix::zeros(4)).unwrap();
    assert!(zero.eigenvalues().iter().all(|z| *z == Complex64::ZERO));
    assert_eq!(eigenvalues(&DenseMatrix::identity(3)).unwrap().eigenvalues(), &[c(1.0, 0.0); 3]);
}

#[test]
fn sorted_by_decreasing_modulus() {
    let s = eigenvalues(&gaussian(3, 30)).unwrap();
    let moduli = s.moduli();
    assert!(moduli.windows(2).all(|w| w[0] >= w[1] - 1e-12 * moduli[0]));
    assert_eq!(s.spectral_radius(), moduli[0]);
    assert_eq!(s.order(), 30);
}

#[test]
fn order_limit_and_shape_errors() {
    let big = DenseMatrix::zeros(MAX_ORDER + 1);
    assert!(matches!(eigenvalues(&big), Err(Error::OrderTooLarge { .. })));
    assert!(matches!(DenseMatrix::new(DMatrix::zeros(2, 3)), Err(Error::NotSquare { rows: 2, cols: 3 })));
    let mut nan = DMatrix::zeros(2, 2);
    nan[(0, 1)] = c(f64::NAN, 0.0);
    assert!(DenseMatrix::new(nan).is_err());
}

#[test]
fn lorentz_norm_of_a_spectrum() {
    let s = Spectrum::from_unsorted(vec![c(0.0, 3.0), c(4.0, 0.0)]);
    let v = spectrum_lorentz_norm(&s, LorentzParams::lp(2.0).unwrap()).unwrap();
    assert!((v - 5.0).abs() < 1e-14);
}

#[test]
fn multiset_distance_pairs_elements() {
    let a = [c(1.0, 0.0), c(0.0, 1.0)];
    let b = [c(0.0, 1.0), c(1.0, 1e-9)];
    assert!((multiset_distance(&a, &b).unwrap() - 1e-9).abs() < 1e-20);
    assert!(multiset_distance(&a, &b[..1]).is_none());
}

#[test]
fn spectrum_json() {
    let s = Spectrum::from_unsorted(vec![c(0.5, -1.0), c(2.0, 0.0)]);
    let json = serde_json::to_string(&s).unwrap();
    assert_eq!(json, "[[2.0,0.0],[0.5,-1.0]]");
    assert_eq!(serde_json::from_str::<Spectrum>(&json).unwrap(), s);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_and_determinant_identities(seed in any::<u64>(), n in 1usize..40) {
        let m = gaussian(seed, n);
        let s = eigenvalues(&m).unwrap();
        let scale = m.frobenius_norm().max(1.0);
        prop_assert!((spectral_trace(&s) - m.trace()).norm() <= 1e-10 * scale * n as f64);
        if n <= 12 {
            let product: Complex64 = s.eigenvalues().iter().product();
            let det = m.as_matrix().clone().determinant();
            prop_assert!((product - det).norm() <= 1e-9 * (1.0 + det.norm()));
            prop_assert!((m.determinant() - det).norm() <= 1e-11 * (1.0 + det.norm()));
        }
    }

    #[test]
    fn similarity_invariance(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = rng_from_seed(seed);
        let d: Vec<Complex64> = (0..n).map(|k| c(k as f64 + 1.0, 0.5 * k as f64)).collect();
        // a well-conditioned similarity: identity plus a small perturbation
        let p = DMatrix::identity(n, n) + complex_gaussian_matrix(&mut rng, n, n) * c(0.1 / n as f64, 0.0);
        let pinv = p.clone().try_inverse().unwrap();
        let m = &p * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone())) * pinv;
        let s = eigenvalues(&DenseMatrix::new(m).unwrap()).unwrap();
        assert_same_multiset(s.eigenvalues(), &d, 1e-9);
    }

    #[test]
    fn real_matrices_have_conjugate_spectra(seed in any::<u64>(), n in 1usize..20) {
        let mut rng = rng_from_seed(seed);
        let m = DenseMatrix::new(real_gaussian_matrix(&mut rng, n, n)).unwrap();
        let s = eigenvalues(&m).unwrap();
        let conj: Vec<Complex64> = s.eigenvalues().iter().map(|z| z.conj()).collect();
        prop_assert!(multiset_distance(s.eigenvalues(), &conj).unwrap() <= 1e-9 * m.frobenius_norm().max(1.0));
    }
}
