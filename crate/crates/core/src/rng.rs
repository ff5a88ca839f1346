//! Seeded randomness for Monte Carlo checks.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::linalg::{orthonormalize_columns, Matrix};
use crate::scalar::Real;

/// Reproducible 64-bit generator; `seed_from_u64` expands the seed with SplitMix64.
pub type SeededRng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Derives an independent stream for `(seed, stream, index)`.
pub fn substream(seed: u64, stream: u64, index: u64) -> SeededRng {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for x in [stream, index] {
        h = (h ^ x).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 31;
    }
    seeded(h)
}

/// Standard complex Gaussian, E|z|² = 1.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::lit(re * s), T::lit(im * s))
}

pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex<T>> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: Gram–Schmidt of a Ginibre matrix (positive
/// diagonal of the implied R factor).
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    orthonormalize_columns(&gaussian_matrix(n, n, rng))
}

/// Random `rows×cols` isometry (orthonormal columns), `rows ≥ cols`.
pub fn random_isometry<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix<T> {
    assert!(rows >= cols);
    orthonormalize_columns(&gaussian_matrix(rows, cols, rng))
}

pub fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}
