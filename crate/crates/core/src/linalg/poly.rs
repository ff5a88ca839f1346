//! Spectra of small non-Hermitian matrices through their characteristic
//! polynomial. Used as an independent cross-check of the Hermitian route.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_ITERATIONS: usize = 2000;
/// Roots whose imaginary part exceeds this (relative to `max(1, |root|)`) are rejected.
pub const COMPLEX_ROOT_TOL: f64 = 1e-6;

/// Coefficients `c_0..=c_n` of det(λI − m) = Σ c_k λ^k (monic, `c_n = 1`), by
/// the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial<T: Real>(m: &Matrix<T>) -> Result<Vec<Complex<T>>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut coeffs = vec![Complex::zero(); n + 1];
    coeffs[n] = Complex::one();
    let mut mk = Matrix::<T>::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = m.matmul(&mk);
        for i in 0..n {
            next[(i, i)] = next[(i, i)] + coeffs[n - k + 1];
        }
        let am = m.matmul(&next);
        coeffs[n - k] = -am.trace() / T::from_usize(k).unwrap();
        mk = next;
    }
    Ok(coeffs)
}

fn horner<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::zero();
    let mut dp = Complex::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of a monic polynomial by simultaneous Weierstrass (Durand–Kerner)
/// iteration followed by a Newton polish of each root.
pub fn polynomial_roots<T: Real>(coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let radius = T::one() + coeffs[..n].iter().fold(T::zero(), |m, c| m.max(c.norm()));
    let seed = Complex::new(T::lit(0.4), T::lit(0.9));
    let mut roots: Vec<Complex<T>> = (0..n).map(|k| seed.powu(k as u32 + 1) * radius * T::lit(0.5)).collect();

    let eps = T::epsilon() * T::lit(4.0);
    for _ in 0..MAX_ITERATIONS {
        let mut max_step = T::zero();
        for i in 0..n {
            let (p, _) = horner(coeffs, roots[i]);
            let mut denom = Complex::one();
            for j in 0..n {
                if i != j {
                    denom = denom * (roots[i] - roots[j]);
                }
            }
            if denom.norm() <= T::min_positive_value() {
                continue;
            }
            let step = p / denom;
            roots[i] = roots[i] - step;
            max_step = max_step.max(step.norm() / roots[i].norm().max(T::one()));
        }
        if max_step <= eps {
            break;
        }
    }

    for root in roots.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(coeffs, *root);
            if dp.norm() <= T::min_positive_value() {
                break;
            }
            let candidate = *root - p / dp;
            if horner(coeffs, candidate).0.norm() < p.norm() {
                *root = candidate;
            } else {
                break;
            }
        }
    }
    roots
}

/// The four eigenvalues of a 4×4 matrix expected to have a real spectrum
/// (such as a product of two PSD matrices), found as roots of det(m − λI).
/// Returned in descending order.
pub fn quartic_spectrum_oracle<T: Real>(m: &Matrix<T>) -> Result<Vec<T>> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::DimensionMismatch {
            context: "quartic oracle matrix order",
            expected: 4,
            found: m.rows().max(m.cols()),
        });
    }
    let scale = m.max_abs();
    if scale.is_zero() {
        return Ok(vec![T::zero(); 4]);
    }
    let scaled = m.scale(T::one() / scale);
    let coeffs = characteristic_polynomial(&scaled)?;
    let mut values = Vec::with_capacity(4);
    for root in polynomial_roots(&coeffs) {
        if root.im.abs() > T::tol(COMPLEX_ROOT_TOL) * root.norm().max(T::one()) {
            return Err(Error::UnexpectedComplexSpectrum {
                re: (root.re * scale).to_f64_lossy(),
                im: (root.im * scale).to_f64_lossy(),
            });
        }
        values.push(root.re * scale);
    }
    values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}
