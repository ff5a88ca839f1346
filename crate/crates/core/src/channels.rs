//! Kraus-represented channels acting on subsystem B, Choi states and the
//! filter map that trades channel dynamics on |ψ⟩ for a local filter on the
//! Choi state.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::random_isometry;
use crate::scalar::Real;
use crate::states::{max_entangled, BipartiteDims, DensityMatrix};

/// Completeness tolerance for Σ K†K = 1.
pub const KRAUS_COMPLETENESS_TOL: f64 = 1e-9;

/// Completely positive map E(ρ) = Σ_k K_k ρ K_k† on a `dim`-level system.
#[derive(Clone, Debug)]
pub struct QuantumChannel<T> {
    dim: usize,
    kraus: Vec<Matrix<T>>,
    trace_preserving: bool,
}

impl<T: Real> QuantumChannel<T> {
    /// Trace-preserving channel; rejects Kraus sets with Σ K†K ≠ 1.
    pub fn new(kraus: Vec<Matrix<T>>) -> Result<Self> {
        let ch = Self::cp_map(kraus)?;
        let dev = ch.completeness_deviation();
        if dev > T::tol(KRAUS_COMPLETENESS_TOL) {
            return Err(Error::InvalidChannel(format!(
                "Kraus operators are not complete: max |Σ K†K − 1| = {dev:e}"
            )));
        }
        Ok(Self {
            trace_preserving: true,
            ..ch
        })
    }

    /// General CP map (possibly trace-decreasing), e.g. a filtering operation.
    pub fn cp_map(kraus: Vec<Matrix<T>>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("at least one Kraus operator required".into()))?;
        let dim = first.rows();
        if dim < 2 {
            return Err(Error::InvalidChannel(format!("channel dimension {dim} < 2")));
        }
        for k in &kraus {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::InvalidChannel(format!(
                    "Kraus operator of shape {}x{} in a {dim}-level channel",
                    k.rows(),
                    k.cols()
                )));
            }
            if k.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("Kraus operator"));
            }
        }
        let mut ch = Self {
            dim,
            kraus,
            trace_preserving: false,
        };
        ch.trace_preserving = ch.completeness_deviation() <= T::tol(KRAUS_COMPLETENESS_TOL);
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(vec![Matrix::identity(dim)])
    }

    /// E(ρ) = (1−ε)ρ + ε·1/d, realized with the d² Weyl operators.
    pub fn depolarizing(dim: usize, eps: T) -> Result<Self> {
        check_eps(eps)?;
        if dim < 2 {
            return Err(Error::param(format!("channel dimension {dim} < 2")));
        }
        let d2 = T::from_usize(dim * dim).unwrap();
        let mut kraus = Vec::with_capacity(dim * dim);
        kraus.push(Matrix::identity(dim).scale((T::one() - eps + eps / d2).sqrt()));
        let w = (eps / d2).sqrt();
        for a in 0..dim {
            for b in 0..dim {
                if (a, b) != (0, 0) {
                    kraus.push(weyl_operator(dim, a, b).scale(w));
                }
            }
        }
        Self::new(kraus)
    }

    /// E(ρ) = (1−ε)ρ + ε Σ_i ρ_ii |i⟩⟨i|.
    pub fn phase_damping(dim: usize, eps: T) -> Result<Self> {
        check_eps(eps)?;
        if dim < 2 {
            return Err(Error::param(format!("channel dimension {dim} < 2")));
        }
        let mut kraus = Vec::with_capacity(dim + 1);
        kraus.push(Matrix::identity(dim).scale((T::one() - eps).sqrt()));
        for i in 0..dim {
            let mut p = Matrix::zeros(dim, dim);
            p[(i, i)] = Complex::new(eps.sqrt(), T::zero());
            kraus.push(p);
        }
        Self::new(kraus)
    }

    /// Random channel with `n_kraus` operators from a Haar-random Stinespring
    /// isometry.
    pub fn random<R: Rng + ?Sized>(dim: usize, n_kraus: usize, rng: &mut R) -> Result<Self> {
        if n_kraus == 0 {
            return Err(Error::param("random channel needs at least one Kraus operator"));
        }
        let iso: Matrix<T> = random_isometry(dim * n_kraus, dim, rng);
        let kraus = (0..n_kraus)
            .map(|k| Matrix::from_fn(dim, dim, |i, j| iso[(k * dim + i, j)]))
            .collect();
        Self::new(kraus)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[Matrix<T>] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    pub fn completeness_deviation(&self) -> T {
        let mut sum = Matrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            sum = &sum + &k.adjoint().matmul(k);
        }
        sum.max_abs_diff(&Matrix::identity(self.dim))
    }

    /// E(ρ) on a single `dim`-level system.
    pub fn act(&self, rho: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out = &out + &rho.conjugate_by(k);
        }
        out
    }

    /// The channel ρ ↦ E(V ρ V†), Kraus operators K_k V.
    pub fn precompose(&self, v: &Matrix<T>) -> Result<Self> {
        if v.rows() != self.dim || v.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "precomposed operator",
                expected: self.dim,
                found: v.rows(),
            });
        }
        Ok(Self {
            dim: self.dim,
            kraus: self.kraus.iter().map(|k| k.matmul(v)).collect(),
            trace_preserving: self.trace_preserving,
        })
    }
}

/// Generalized Pauli X^a Z^b with X|j⟩ = |j+1⟩, Z|j⟩ = e^{2πij/d}|j⟩.
pub fn weyl_operator<T: Real>(d: usize, a: usize, b: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(d, d);
    let two_pi = T::lit(std::f64::consts::TAU);
    for j in 0..d {
        let angle = two_pi * T::from_usize((b * j) % d).unwrap() / T::from_usize(d).unwrap();
        m[((j + a) % d, j)] = Complex::from_polar(T::one(), angle);
    }
    m
}

fn check_eps<T: Real>(eps: T) -> Result<()> {
    if !(eps >= T::zero() && eps <= T::one()) {
        return Err(Error::param(format!("noise strength {eps} outside [0, 1]")));
    }
    Ok(())
}

/// Σ_k (1⊗K_k) ρ (1⊗K_k)† without renormalization. Works blockwise: the
/// (i, j) block of the output is E applied to the (i, j) block of ρ.
pub fn apply_one_sided_raw<T: Real>(ch: &QuantumChannel<T>, rho: &Matrix<T>, dims: BipartiteDims) -> Result<Matrix<T>> {
    if ch.dim() != dims.d2 {
        return Err(Error::DimensionMismatch {
            context: "channel dimension vs subsystem B",
            expected: dims.d2,
            found: ch.dim(),
        });
    }
    if rho.rows() != dims.total() || rho.cols() != dims.total() {
        return Err(Error::DimensionMismatch {
            context: "state order",
            expected: dims.total(),
            found: rho.rows(),
        });
    }
    let (d1, d2) = (dims.d1, dims.d2);
    let mut out = Matrix::zeros(dims.total(), dims.total());
    for i in 0..d1 {
        for j in 0..d1 {
            let block = Matrix::from_fn(d2, d2, |a, b| rho[(i * d2 + a, j * d2 + b)]);
            let mapped = ch.act(&block);
            for a in 0..d2 {
                for b in 0..d2 {
                    out[(i * d2 + a, j * d2 + b)] = mapped[(a, b)];
                }
            }
        }
    }
    Ok(out.hermitian_part())
}

/// (1⊗E)ρ, renormalized to unit trace when E is trace-decreasing.
pub fn apply_one_sided<T: Real>(ch: &QuantumChannel<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    let out = apply_one_sided_raw(ch, rho.matrix(), rho.dims())?;
    if ch.is_trace_preserving() {
        Ok(DensityMatrix::trusted(rho.dims(), out))
    } else {
        Ok(DensityMatrix::normalize_trusted(rho.dims(), out)?.0)
    }
}

/// Normalized Choi state ρ_E = (1⊗E)|φ⁺⟩⟨φ⁺| / p″.
#[derive(Clone, Debug)]
pub struct ChoiState<T> {
    pub state: DensityMatrix<T>,
    pub channel_dim: usize,
    /// p″, the trace before normalization (1 for trace-preserving channels).
    pub trace: T,
}

pub fn choi<T: Real>(ch: &QuantumChannel<T>) -> Result<ChoiState<T>> {
    let phi = max_entangled::<T>(ch.dim())?;
    let raw = apply_one_sided_raw(ch, &phi.projector(), phi.dims())?;
    let (state, trace) = DensityMatrix::normalize_trusted(phi.dims(), raw)?;
    Ok(ChoiState {
        state,
        channel_dim: ch.dim(),
        trace,
    })
}

/// Output of the filter map on a Choi state.
#[derive(Clone, Debug)]
pub struct FilterOutput<T> {
    /// (M⊗1)ρ_E(M†⊗1) / p
    pub state: DensityMatrix<T>,
    /// p: trace of the filtered Choi state
    pub p: T,
    /// p′ = d²·p·p″: trace of (1⊗E)|ψ⟩⟨ψ|
    pub p_prime: T,
    /// p″: trace of the unnormalized Choi state
    pub p_double_prime: T,
}

/// Applies the local filter M = (1/√d) Σ_i √ω_i |i⟩⟨i| to subsystem A of the
/// Choi state. For |ψ⟩ = Σ √ω_i |ii⟩ the normalized result equals
/// (1⊗E)|ψ⟩⟨ψ| / p′.
pub fn filter_map<T: Real>(omega: &[T], choi: &ChoiState<T>) -> Result<FilterOutput<T>> {
    let d = choi.channel_dim;
    if omega.len() != d {
        return Err(Error::DimensionMismatch {
            context: "Schmidt coefficients vs channel dimension",
            expected: d,
            found: omega.len(),
        });
    }
    if omega.iter().any(|&w| !(w >= T::zero())) {
        return Err(Error::param("Schmidt coefficients must be nonnegative"));
    }
    let df = T::from_usize(d).unwrap();
    let inv_sqrt_d = T::one() / df.sqrt();
    let m_diag: Vec<T> = omega.iter().map(|&w| w.sqrt() * inv_sqrt_d).collect();
    let rho = choi.state.matrix();
    // (M⊗1) is diagonal: entry (i·d + a) carries m_i
    let filtered = Matrix::from_fn(d * d, d * d, |r, c| rho[(r, c)] * (m_diag[r / d] * m_diag[c / d]));
    let dims = choi.state.dims();
    let (state, p) = DensityMatrix::normalize_trusted(dims, filtered)?;
    let p_double_prime = choi.trace;
    Ok(FilterOutput {
        state,
        p,
        p_prime: df * df * p * p_double_prime,
        p_double_prime,
    })
}

impl<T: Real> ChoiState<T> {
    /// Reduced state on subsystem A (1/d for trace-preserving channels).
    pub fn marginal_a(&self) -> Matrix<T> {
        self.state.partial_trace_b()
    }
}
