use num_complex::Complex;
use num_traits::Zero;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hermitian input tolerance (relative to `max(1, ‖m‖_F)`).
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_CLAMP_TOL, 0)` are roundoff and clamp to zero.
pub const PSD_CLAMP_TOL: f64 = 1e-9;
/// Jacobi stops when the off-diagonal Frobenius mass drops below this times ‖m‖_F.
pub const JACOBI_OFF_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with optional eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Option<Matrix<T>>,
}

impl<T: Real> Spectrum<T> {
    /// V·diag(f(λ))·V†. Panics if vectors were not requested.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let v = self
            .eigenvectors
            .as_ref()
            .expect("spectrum computed without eigenvectors");
        let n = v.rows();
        let mut out = Matrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w.is_zero() {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn min(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of `a_pq` with a diagonal unitary and
/// then applies the real symmetric Jacobi rotation, so the combined update is
/// a single unitary acting on rows/columns `p` and `q`.
pub fn hermitian_eigen<T: Real>(m: &Matrix<T>, want_vectors: bool) -> Result<Spectrum<T>> {
    m.ensure_hermitian(T::tol(HERMITIAN_TOL))?;
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = want_vectors.then(|| Matrix::identity(n));

    let norm = a.frobenius_norm();
    let target = T::tol(JACOBI_OFF_TOL) * norm;
    let mut converged = norm.is_zero();
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged || off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                rotate(&mut a, v.as_mut(), p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<(T, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    // stable: equal eigenvalues keep Jacobi output order
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = order.iter().map(|&(lam, _)| lam).collect();
    let eigenvectors = v.map(|v| Matrix::from_fn(n, n, |i, k| v[(i, order[k].1)]));
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate<T: Real>(a: &mut Matrix<T>, v: Option<&mut Matrix<T>>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= T::min_positive_value() {
        return;
    }
    let phase = apq / mag; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (mag + mag);
    let t = if theta.abs() > T::max_value().sqrt() {
        T::one() / (theta + theta)
    } else {
        theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let ph_conj = phase.conj();

    let n = a.rows();
    // A ← A·U
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - ph_conj * akq * s;
        a[(k, q)] = akp * s + ph_conj * akq * c;
    }
    // A ← U†·A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - phase * aqk * s;
        a[(q, k)] = apk * s + phase * aqk * c;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * c - ph_conj * vkq * s;
            v[(k, q)] = vkp * s + ph_conj * vkq * c;
        }
    }
}

/// Clamps eigenvalues in `[-tol·scale, 0)` to zero and rejects anything lower.
pub(crate) fn clamp_psd<T: Real>(spec: &mut Spectrum<T>, scale: T) -> Result<()> {
    let floor = -T::tol(PSD_CLAMP_TOL) * scale.max(T::one());
    for lam in spec.eigenvalues.iter_mut() {
        if *lam < floor {
            return Err(Error::NotPsd {
                min_eigenvalue: lam.to_f64_lossy(),
            });
        }
        if *lam < T::zero() {
            *lam = T::zero();
        }
    }
    Ok(())
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn psd_sqrt<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let mut spec = hermitian_eigen(m, true)?;
    clamp_psd(&mut spec, m.frobenius_norm())?;
    Ok(spec.reconstruct_with(|lam| lam.sqrt()))
}

/// Singular values in descending order, `min(rows, cols)` of them, from the
/// spectrum of the smaller Gram matrix.
pub fn svd_values<T: Real>(m: &Matrix<T>) -> Result<Vec<T>> {
    let gram = if m.rows() >= m.cols() {
        m.adjoint().matmul(m)
    } else {
        m.matmul(&m.adjoint())
    };
    let spec = hermitian_eigen(&gram, false)?;
    Ok(spec
        .eigenvalues
        .into_iter()
        .map(|lam| lam.max(T::zero()).sqrt())
        .collect())
}

/// Singular values in descending order, `min(rows, cols)` of them, read off
/// the spectrum ±σ of the Hermitian dilation [[0, m], [m†, 0]].
///
/// Unlike [`svd_values`] no square root of a computed eigenvalue is taken, so
/// small singular values carry absolute error ~ε‖m‖ rather than ~√ε‖m‖.
pub fn singular_values_dilation<T: Real>(m: &Matrix<T>) -> Result<Vec<T>> {
    let (r, c) = (m.rows(), m.cols());
    let n = r + c;
    let dilation = Matrix::from_fn(n, n, |i, j| {
        if i < r && j >= r {
            m[(i, j - r)]
        } else if i >= r && j < r {
            m[(j, i - r)].conj()
        } else {
            Complex::zero()
        }
    });
    let spec = hermitian_eigen(&dilation, false)?;
    Ok(spec
        .eigenvalues
        .into_iter()
        .take(r.min(c))
        .map(|s| s.max(T::zero()))
        .collect())
}
