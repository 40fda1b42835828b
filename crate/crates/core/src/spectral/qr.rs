//! Eigenvalues of a complex square matrix: Householder reduction to upper
//! Hessenberg form followed by implicitly shifted single-shift QR sweeps with
//! Wilkinson shifts. Only eigenvalues are computed, so every rotation is
//! applied to the active window alone.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Total QR sweeps allowed per unit of matrix order.
pub const SWEEPS_PER_ORDER: usize = 100;
/// Sweeps without a deflation before an exceptional shift is tried.
const STAGNATION: usize = 10;

pub(crate) fn eigenvalues_unsorted(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let mut h = m.clone();
    reduce_to_hessenberg(&mut h);
    hessenberg_qr(&mut h, SWEEPS_PER_ORDER * n.max(1))
}

/// In-place similarity reduction to upper Hessenberg form.
fn reduce_to_hessenberg(a: &mut DMatrix<Complex64>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    let mut v = vec![Complex64::ZERO; n];
    for k in 0..n - 2 {
        let tail_norm_sqr: f64 = ((k + 2)..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail_norm_sqr == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let norm = (tail_norm_sqr + x0.norm_sqr()).sqrt();
        let phase = if x0 == Complex64::ZERO { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;

        // v = x - alpha e_1, normalized; H = I - 2 v v^H
        let len = n - k - 1;
        v[0] = x0 - alpha;
        for i in 1..len {
            v[i] = a[(k + 1 + i, k)];
        }
        let vnorm = v[..len].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v[..len].iter_mut() {
            *z /= vnorm;
        }

        // H A on rows k+1.., columns k..
        for j in k..n {
            let mut dot = Complex64::ZERO;
            for i in 0..len {
                dot += v[i].conj() * a[(k + 1 + i, j)];
            }
            dot *= 2.0;
            for i in 0..len {
                a[(k + 1 + i, j)] -= v[i] * dot;
            }
        }
        // A H on all rows, columns k+1..
        for i in 0..n {
            let mut dot = Complex64::ZERO;
            for jj in 0..len {
                dot += a[(i, k + 1 + jj)] * v[jj];
            }
            dot *= 2.0;
            for jj in 0..len {
                a[(i, k + 1 + jj)] -= dot * v[jj].conj();
            }
        }
        a[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            a[(i, k)] = Complex64::ZERO;
        }
    }
}

/// Rotation `[c s; -conj(s) c]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b == Complex64::ZERO {
        return (1.0, Complex64::ZERO);
    }
    if a == Complex64::ZERO {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let an = a.norm();
    let norm = an.hypot(b.norm());
    let c = an / norm;
    let s = (a / an) * b.conj() / norm;
    (c, s)
}

/// Eigenvalue of the 2x2 block `[a b; c d]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg_qr(h: &mut DMatrix<Complex64>, budget: usize) -> Result<Vec<Complex64>> {
    let n = h.nrows();
    let mut eig = vec![Complex64::ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = f64::MIN_POSITIVE * (n as f64);
    let eps = f64::EPSILON;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;

    loop {
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut local = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if local == 0.0 {
                local = scale;
            }
            if sub <= eps * local || sub <= tiny {
                h[(lo, lo - 1)] = Complex64::ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            since_deflation = 0;
            if hi == 0 {
                return Ok(eig);
            }
            hi -= 1;
            continue;
        }

        if sweeps >= budget {
            return Err(Error::NoConvergence { budget, unresolved: hi + 1 });
        }
        sweeps += 1;
        since_deflation += 1;

        let shift = if since_deflation % STAGNATION == 0 {
            // Exceptional shift: a pseudo-random point on a circle sized by the
            // trailing subdiagonal.
            let angle = 2.399_963_229_728_653 * sweeps as f64;
            let radius = h[(hi, hi - 1)].norm() + if hi >= 2 { h[(hi - 1, hi - 2)].norm() } else { 0.0 };
            h[(hi, hi)] + Complex64::from_polar(0.75 * radius.max(eps * scale), angle)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        qr_sweep(h, lo, hi, shift);
    }
}

/// One implicit single-shift QR sweep on the window `lo..=hi`.
fn qr_sweep(h: &mut DMatrix<Complex64>, lo: usize, hi: usize, shift: Complex64) {
    let mut x = h[(lo, lo)] - shift;
    let mut y = h[(lo + 1, lo)];
    for k in lo..hi {
        if k > lo {
            x = h[(k, k - 1)];
            y = h[(k + 1, k - 1)];
        }
        let (c, s) = givens(x, y);
        let first_col = if k > lo { k - 1 } else { lo };
        // rows k, k+1
        for j in first_col..=hi {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = a * c + s * b;
            h[(k + 1, j)] = -s.conj() * a + b * c;
        }
        // columns k, k+1
        let last_row = (k + 2).min(hi);
        for i in lo..=last_row {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + s.conj() * b;
            h[(i, k + 1)] = -s * a + b * c;
        }
        if k > lo {
            h[(k + 1, k - 1)] = Complex64::ZERO;
        }
    }
}
