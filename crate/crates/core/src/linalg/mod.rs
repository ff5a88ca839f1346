//! Dense complex linear algebra for small matrices.

mod eigen;
mod matrix;
mod poly;

pub(crate) use eigen::clamp_psd;
pub use eigen::{
    hermitian_eigen, psd_sqrt, singular_values_dilation, svd_values, Spectrum, HERMITIAN_TOL, JACOBI_MAX_SWEEPS,
    JACOBI_OFF_TOL, PSD_CLAMP_TOL,
};
pub use matrix::Matrix;
pub use poly::{characteristic_polynomial, polynomial_roots, quartic_spectrum_oracle};

use num_complex::Complex;

use crate::scalar::Real;

/// Euclidean norm of a complex vector.
pub fn vec_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// <a|b>
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Modified Gram–Schmidt on the columns of `m`. Columns that become
/// numerically dependent are replaced by the first standard basis vector that
/// is not, so the result is always unitary for square input.
pub fn orthonormalize_columns<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    let n = m.rows();
    let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(m.cols());
    let mut fallback = 0usize;
    for j in 0..m.cols() {
        let mut v = m.column(j);
        if !project_out(&mut v, &basis) {
            loop {
                assert!(fallback < n, "more columns than dimensions");
                let mut e = vec![Complex::new(T::zero(), T::zero()); n];
                e[fallback] = Complex::new(T::one(), T::zero());
                fallback += 1;
                if project_out(&mut e, &basis) {
                    v = e;
                    break;
                }
            }
        }
        basis.push(v);
    }
    Matrix::from_columns(&basis)
}

fn project_out<T: Real>(v: &mut [Complex<T>], basis: &[Vec<Complex<T>>]) -> bool {
    let before = vec_norm(v);
    // two passes of MGS for orthogonality at roundoff level
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x = *x - c * y;
            }
        }
    }
    let after = vec_norm(v);
    if after <= T::tol(1e-10) * before.max(T::min_positive_value()) || after.is_zero() {
        return false;
    }
    for x in v.iter_mut() {
        *x = *x / after;
    }
    true
}
