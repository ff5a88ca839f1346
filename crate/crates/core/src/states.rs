//! Bipartite pure and mixed states, Schmidt decomposition and the named
//! state families.
//!
//! Amplitude index `i·d2 + j` labels |i⟩_A ⊗ |j⟩_B everywhere in the crate.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    clamp_psd, hermitian_eigen, orthonormalize_columns, svd_values, vec_norm, Matrix, Spectrum, HERMITIAN_TOL,
};
use crate::rng::{gaussian_vector, seeded};
use crate::scalar::Real;

pub const NORM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const SCHMIDT_SUM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteDims {
    pub d1: usize,
    pub d2: usize,
}

impl BipartiteDims {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 < 2 || d2 < 2 {
            return Err(Error::param(format!(
                "subsystem dimensions must be at least 2, got {d1}x{d2}"
            )));
        }
        Ok(Self { d1, d2 })
    }

    pub fn square(d: usize) -> Result<Self> {
        Self::new(d, d)
    }

    #[inline]
    pub fn total(&self) -> usize {
        self.d1 * self.d2
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.d2 + j
    }

    pub fn is_square(&self) -> bool {
        self.d1 == self.d2
    }
}

/// Normalized state vector on d1⊗d2.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    dims: BipartiteDims,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    pub fn new(dims: BipartiteDims, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_len(dims.total(), amplitudes.len(), "pure state amplitudes")?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("pure state"));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - T::one()).abs() > T::tol(NORM_TOL) {
            return Err(Error::InvalidState(format!("state vector norm {norm} differs from 1")));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Normalizes the given vector; fails only for a zero or non-finite vector.
    pub fn normalized(dims: BipartiteDims, mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_len(dims.total(), amplitudes.len(), "pure state amplitudes")?;
        let norm = vec_norm(&amplitudes);
        if !norm.is_finite() || norm.is_zero() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        for z in amplitudes.iter_mut() {
            *z = *z / norm;
        }
        Self::new(dims, amplitudes)
    }

    /// Product basis state |i⟩|j⟩.
    pub fn basis(dims: BipartiteDims, i: usize, j: usize) -> Result<Self> {
        if i >= dims.d1 || j >= dims.d2 {
            return Err(Error::param(format!(
                "basis state |{i}{j}> outside {}x{}",
                dims.d1, dims.d2
            )));
        }
        let mut amps = vec![Complex::zero(); dims.total()];
        amps[dims.index(i, j)] = Complex::one();
        Ok(Self { dims, amplitudes: amps })
    }

    /// Σ_i √ω_i |ii⟩ on d⊗d with d = ω.len().
    pub fn from_schmidt(omega: &[T]) -> Result<Self> {
        let dims = BipartiteDims::square(omega.len())?;
        validate_weights(omega)?;
        let mut amps = vec![Complex::zero(); dims.total()];
        for (i, &w) in omega.iter().enumerate() {
            amps[dims.index(i, i)] = Complex::new(w.sqrt(), T::zero());
        }
        Self::normalized(dims, amps)
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// Amplitudes reshaped to the d1×d2 coefficient matrix.
    pub fn coefficient_matrix(&self) -> Matrix<T> {
        Matrix::from_vec(self.dims.d1, self.dims.d2, self.amplitudes.clone()).expect("length checked at construction")
    }

    /// ρ_A = Tr_B |ψ⟩⟨ψ| = C C†.
    pub fn reduced_a(&self) -> Matrix<T> {
        let c = self.coefficient_matrix();
        c.matmul(&c.adjoint())
    }

    /// Tr ρ_A², the purity of either marginal.
    pub fn marginal_purity(&self) -> T {
        let ra = self.reduced_a();
        ra.matmul(&ra).trace().re
    }

    pub fn projector(&self) -> Matrix<T> {
        Matrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix::trusted(self.dims, self.projector())
    }

    /// (U ⊗ V)|ψ⟩.
    pub fn apply_local(&self, u: &Matrix<T>, v: &Matrix<T>) -> Result<Self> {
        check_len(self.dims.d1, u.rows(), "A-side operator")?;
        check_len(self.dims.d2, v.rows(), "B-side operator")?;
        // C → U C Vᵀ
        let c = u.matmul(&self.coefficient_matrix()).matmul(&v.transpose());
        Self::new(self.dims, c.into_vec())
    }

    /// |⟨self|other⟩|
    pub fn overlap(&self, other: &Self) -> T {
        crate::linalg::inner(&self.amplitudes, &other.amplitudes).norm()
    }
}

/// Schmidt coefficients (descending) with the local bases realizing them:
/// |ψ⟩ = Σ_k √ω_k |a_k⟩|b_k⟩ where a_k, b_k are the k-th columns of
/// `basis_a`, `basis_b`.
#[derive(Clone, Debug)]
pub struct SchmidtData<T> {
    pub coefficients: Vec<T>,
    pub basis_a: Matrix<T>,
    pub basis_b: Matrix<T>,
}

impl<T: Real> SchmidtData<T> {
    /// Number of coefficients above `threshold`.
    pub fn rank(&self, threshold: T) -> usize {
        self.coefficients.iter().filter(|&&w| w > threshold).count()
    }
}

pub fn schmidt<T: Real>(psi: &PureState<T>) -> Result<SchmidtData<T>> {
    let dims = psi.dims();
    let c = psi.coefficient_matrix();
    let coefficients: Vec<T> = svd_values(&c)?.into_iter().map(|s| s * s).collect();
    let sum: T = coefficients.iter().copied().sum();
    if (sum - T::one()).abs() > T::tol(SCHMIDT_SUM_TOL) {
        return Err(Error::InvalidState(format!("Schmidt coefficients sum to {sum}")));
    }

    let spec_a = hermitian_eigen(&psi.reduced_a(), true)?;
    let basis_a = orthonormalize_columns(spec_a.eigenvectors.as_ref().expect("requested"));

    // b_k ∝ Cᵀ conj(a_k): keeps the pairing exact even for tiny ω_k
    let ct = c.transpose();
    let cols: Vec<Vec<Complex<T>>> = (0..dims.d2)
        .map(|k| {
            if k >= dims.d1 {
                return vec![Complex::zero(); dims.d2];
            }
            let a_conj: Vec<_> = basis_a.column(k).iter().map(|z| z.conj()).collect();
            let w = ct.mul_vec(&a_conj);
            let n = vec_norm(&w);
            if n <= T::min_positive_value() {
                vec![Complex::zero(); dims.d2]
            } else {
                w.into_iter().map(|z| z / n).collect()
            }
        })
        .collect();
    let basis_b = orthonormalize_columns(&Matrix::from_columns(&cols));

    Ok(SchmidtData {
        coefficients,
        basis_a,
        basis_b,
    })
}

/// Trace-one Hermitian PSD matrix on d1⊗d2.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    dims: BipartiteDims,
    matrix: Matrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity (1e-10), unit trace (1e-10) and eigenvalues ≥ −1e-9.
    pub fn new(dims: BipartiteDims, matrix: Matrix<T>) -> Result<Self> {
        check_len(dims.total(), matrix.rows(), "density matrix order")?;
        check_len(dims.total(), matrix.cols(), "density matrix order")?;
        if matrix.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        matrix.ensure_hermitian(T::tol(HERMITIAN_TOL))?;
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > T::tol(TRACE_TOL) || tr.im.abs() > T::tol(TRACE_TOL) {
            return Err(Error::InvalidState(format!("trace {} differs from 1", tr.re)));
        }
        let mut spec = hermitian_eigen(&matrix, false)?;
        clamp_psd(&mut spec, T::one())?;
        Ok(Self { dims, matrix })
    }

    /// Skips the eigenvalue check for matrices produced by trusted code paths.
    pub(crate) fn trusted(dims: BipartiteDims, matrix: Matrix<T>) -> Self {
        debug_assert_eq!(matrix.rows(), dims.total());
        Self { dims, matrix }
    }

    /// Rescales a Hermitian PSD matrix to unit trace.
    pub(crate) fn normalize_trusted(dims: BipartiteDims, matrix: Matrix<T>) -> Result<(Self, T)> {
        let tr = matrix.trace().re;
        if !(tr > T::zero()) {
            return Err(Error::InvalidState(format!("cannot normalize: trace {tr}")));
        }
        Ok((Self::trusted(dims, matrix.scale(T::one() / tr)), tr))
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn spectrum(&self, want_vectors: bool) -> Result<Spectrum<T>> {
        hermitian_eigen(&self.matrix, want_vectors)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.spectrum(false)?.min())
    }

    /// Convex combination Σ w_k ρ_k; weights must be nonnegative and sum to 1.
    pub fn mix(parts: &[(T, &DensityMatrix<T>)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::param("empty mixture"))?;
        let weights: Vec<T> = parts.iter().map(|p| p.0).collect();
        validate_weights(&weights)?;
        let dims = first.1.dims;
        let mut acc = Matrix::zeros(dims.total(), dims.total());
        for (w, rho) in parts {
            if rho.dims != dims {
                return Err(Error::DimensionMismatch {
                    context: "mixture components",
                    expected: dims.total(),
                    found: rho.dims.total(),
                });
            }
            acc = &acc + &rho.matrix.scale(*w);
        }
        Ok(Self::trusted(dims, acc))
    }

    /// (U ⊗ V) ρ (U ⊗ V)†.
    pub fn apply_local(&self, u: &Matrix<T>, v: &Matrix<T>) -> Result<Self> {
        check_len(self.dims.d1, u.rows(), "A-side operator")?;
        check_len(self.dims.d2, v.rows(), "B-side operator")?;
        let uv = u.kron(v);
        Ok(Self::trusted(self.dims, self.matrix.conjugate_by(&uv).hermitian_part()))
    }

    /// Tr_B ρ.
    pub fn partial_trace_b(&self) -> Matrix<T> {
        let BipartiteDims { d1, d2 } = self.dims;
        Matrix::from_fn(d1, d1, |i, k| {
            (0..d2).map(|j| self.matrix[(i * d2 + j, k * d2 + j)]).sum()
        })
    }

    /// Tr_A ρ.
    pub fn partial_trace_a(&self) -> Matrix<T> {
        let BipartiteDims { d1, d2 } = self.dims;
        Matrix::from_fn(d2, d2, |j, l| {
            (0..d1).map(|i| self.matrix[(i * d2 + j, i * d2 + l)]).sum()
        })
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn fidelity_with(&self, psi: &PureState<T>) -> T {
        let rv = self.matrix.mul_vec(psi.amplitudes());
        crate::linalg::inner(psi.amplitudes(), &rv).re
    }
}

/// (1/√d) Σ_i |ii⟩.
pub fn max_entangled<T: Real>(d: usize) -> Result<PureState<T>> {
    let dims = BipartiteDims::square(d)?;
    let amp = Complex::new(T::one() / T::from_usize(d).unwrap().sqrt(), T::zero());
    let mut amps = vec![Complex::zero(); dims.total()];
    for i in 0..d {
        amps[dims.index(i, i)] = amp;
    }
    Ok(PureState { dims, amplitudes: amps })
}

/// ρ_F = (1−F)/(d²−1)·(1 − |φ⁺⟩⟨φ⁺|) + F|φ⁺⟩⟨φ⁺|.
pub fn isotropic<T: Real>(d: usize, fidelity: T) -> Result<DensityMatrix<T>> {
    if !(fidelity >= T::zero() && fidelity <= T::one()) {
        return Err(Error::param(format!("isotropic fidelity {fidelity} outside [0, 1]")));
    }
    let phi = max_entangled::<T>(d)?;
    let n = d * d;
    let background = (T::one() - fidelity) / T::from_usize(n - 1).unwrap();
    let proj = phi.projector();
    let m = Matrix::from_fn(n, n, |i, j| {
        let delta = if i == j { T::one() } else { T::zero() };
        let p = proj[(i, j)];
        Complex::new(delta, T::zero()) * background + p * (fidelity - background)
    });
    Ok(DensityMatrix::trusted(phi.dims(), m))
}

/// Flip operator SWAP|ij⟩ = |ji⟩ on d⊗d.
pub fn swap_operator<T: Real>(d: usize) -> Matrix<T> {
    let n = d * d;
    let mut m = Matrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = Complex::one();
        }
    }
    m
}

/// Werner family ρ_W = (1 − μ·SWAP)/(d² − dμ), μ ∈ [−1, 1].
///
/// μ = 0 is maximally mixed; for d = 2 the singlet fidelity is
/// (1+μ)/(4−2μ) and μ = 1/2 is the separability boundary.
pub fn werner<T: Real>(d: usize, mixing: T) -> Result<DensityMatrix<T>> {
    let dims = BipartiteDims::square(d)?;
    if !(mixing >= -T::one() && mixing <= T::one()) {
        return Err(Error::param(format!(
            "Werner parameter {mixing} outside [-1, 1] gives a non-PSD matrix"
        )));
    }
    let df = T::from_usize(d).unwrap();
    let norm = T::one() / (df * df - df * mixing);
    let swap = swap_operator::<T>(d);
    let m = Matrix::from_fn(dims.total(), dims.total(), |i, j| {
        let delta = if i == j { T::one() } else { T::zero() };
        (Complex::new(delta, T::zero()) - swap[(i, j)] * mixing) * norm
    });
    Ok(DensityMatrix::trusted(dims, m))
}

pub fn haar_random_pure<T: Real>(dims: BipartiteDims, seed: u64) -> PureState<T> {
    haar_random_pure_with(dims, &mut seeded(seed))
}

/// Normalized complex Gaussian vector (Haar measure on the unit sphere).
pub fn haar_random_pure_with<T: Real, R: Rng + ?Sized>(dims: BipartiteDims, rng: &mut R) -> PureState<T> {
    loop {
        let v = gaussian_vector(dims.total(), rng);
        if let Ok(psi) = PureState::normalized(dims, v) {
            return psi;
        }
    }
}

pub fn random_mixed<T: Real>(dims: BipartiteDims, rank: usize, seed: u64) -> Result<DensityMatrix<T>> {
    random_mixed_with(dims, rank, &mut seeded(seed))
}

/// ρ ∝ Σ_k g_k g_k† over `rank` complex Gaussian vectors.
pub fn random_mixed_with<T: Real, R: Rng + ?Sized>(
    dims: BipartiteDims,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix<T>> {
    if rank == 0 || rank > dims.total() {
        return Err(Error::param(format!("rank {rank} outside 1..={}", dims.total())));
    }
    let n = dims.total();
    let mut acc = Matrix::zeros(n, n);
    for _ in 0..rank {
        let g: Vec<Complex<T>> = gaussian_vector(n, rng);
        acc = &acc + &Matrix::outer(&g, &g);
    }
    let (rho, _) = DensityMatrix::normalize_trusted(dims, acc.hermitian_part())?;
    Ok(rho)
}

fn check_len(expected: usize, found: usize, context: &'static str) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

fn validate_weights<T: Real>(w: &[T]) -> Result<()> {
    if w.iter().any(|&x| !(x >= T::zero()) || !x.is_finite()) {
        return Err(Error::param("weights must be finite and nonnegative"));
    }
    let sum: T = w.iter().copied().sum();
    if (sum - T::one()).abs() > T::tol(SCHMIDT_SUM_TOL) {
        return Err(Error::param(format!("weights sum to {sum}, expected 1")));
    }
    Ok(())
}
