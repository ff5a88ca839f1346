//! The analytic lower bound τ of squared concurrence, its two-qubit
//! components, pure-state concurrence and analytic values for isotropic
//! states.
//!
//! τ(ρ) = Σ C²_{pr,p′r′}(ρ) over all level pairs p<r on A and p′<r′ on B,
//! where each component is the two-qubit concurrence of the 4×4 principal
//! submatrix on levels {p,r}⊗{p′,r′}.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    clamp_psd, hermitian_eigen, inner, orthonormalize_columns, psd_sqrt, quartic_spectrum_oracle,
    singular_values_dilation, Matrix,
};
use crate::rng::{gaussian_matrix, random_isometry, seeded};
use crate::scalar::Real;
use crate::states::{BipartiteDims, DensityMatrix, PureState};

/// Concurrence values below this are reported as exactly zero.
pub const CONCURRENCE_ZERO_TOL: f64 = 1e-12;
/// Eigenvalues of ρ below this are dropped from tangle decompositions.
pub const RANK_TOL: f64 = 1e-12;

/// Level pairs (p, r) on A and (p′, r′) on B selecting one 4×4 component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ComponentIndex {
    pub p: usize,
    pub r: usize,
    pub pp: usize,
    pub rp: usize,
}

impl ComponentIndex {
    pub fn new(p: usize, r: usize, pp: usize, rp: usize) -> Self {
        Self { p, r, pp, rp }
    }

    pub fn validate(&self, dims: BipartiteDims) -> Result<()> {
        if self.p < self.r && self.r < dims.d1 && self.pp < self.rp && self.rp < dims.d2 {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange(format!(
                "({},{}),({},{}) in {}x{}",
                self.p, self.r, self.pp, self.rp, dims.d1, dims.d2
            )))
        }
    }

    /// Global basis indices |pp′⟩, |pr′⟩, |rp′⟩, |rr′⟩ in that order.
    pub fn basis_indices(&self, dims: BipartiteDims) -> [usize; 4] {
        [
            dims.index(self.p, self.pp),
            dims.index(self.p, self.rp),
            dims.index(self.r, self.pp),
            dims.index(self.r, self.rp),
        ]
    }

    /// True for the components that survive on a state in Schmidt form.
    pub fn is_diagonal(&self) -> bool {
        self.p == self.pp && self.r == self.rp
    }
}

/// All component indices in lexicographic (p, r, p′, r′) order; there are
/// d1·d2·(d1−1)·(d2−1)/4 of them.
pub fn component_indices(dims: BipartiteDims) -> Vec<ComponentIndex> {
    let mut out = Vec::with_capacity(component_count(dims));
    for p in 0..dims.d1 {
        for r in p + 1..dims.d1 {
            for pp in 0..dims.d2 {
                for rp in pp + 1..dims.d2 {
                    out.push(ComponentIndex { p, r, pp, rp });
                }
            }
        }
    }
    out
}

pub fn component_count(dims: BipartiteDims) -> usize {
    dims.d1 * dims.d2 * (dims.d1 - 1) * (dims.d2 - 1) / 4
}

/// The 4×4 principal submatrix of ρ on levels {p,r}⊗{p′,r′}.
pub fn component_submatrix<T: Real>(rho: &Matrix<T>, dims: BipartiteDims, idx: ComponentIndex) -> Matrix<T> {
    rho.principal_submatrix(&idx.basis_indices(dims))
}

/// (σ_y⊗σ_y) m* (σ_y⊗σ_y) for a 4×4 matrix. σ_y⊗σ_y is real with entries
/// ±1 on the anti-diagonal, so this is a signed index reversal of m*.
pub fn spin_flip<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    assert_eq!((m.rows(), m.cols()), (4, 4));
    const SIGN: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
    Matrix::from_fn(4, 4, |i, j| m[(3 - i, 3 - j)].conj() * T::lit(SIGN[i] * SIGN[j]))
}

/// SO(d) generator L_pr = |p⟩⟨r| − |r⟩⟨p|.
pub fn level_generator<T: Real>(d: usize, p: usize, r: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(d, d);
    m[(p, r)] = Complex::new(T::one(), T::zero());
    m[(r, p)] = Complex::new(-T::one(), T::zero());
    m
}

/// (L_pr ⊗ L_p′r′) ρ* (L_pr ⊗ L_p′r′) on the full space.
pub fn spin_flip_full<T: Real>(rho: &Matrix<T>, dims: BipartiteDims, idx: ComponentIndex) -> Matrix<T> {
    let l = level_generator::<T>(dims.d1, idx.p, idx.r).kron(&level_generator(dims.d2, idx.pp, idx.rp));
    l.matmul(&rho.conj()).matmul(&l)
}

/// Square roots of the eigenvalues of m·m̃ for a 4×4 PSD block, descending.
///
/// Computed as the singular values of the symmetric matrix
/// τ_ij = ⟨w_i|σ_y⊗σ_y|w_j*⟩ built from the eigen-ensemble w_k = √μ_k|e_k⟩ of m
/// (ττ* is similar to m·m̃). Roundoff in null directions of m enters τ only at
/// second order, so rank-deficient blocks keep full absolute accuracy.
pub fn block_spectrum<T: Real>(block: &Matrix<T>) -> Result<[T; 4]> {
    let mut spec = hermitian_eigen(block, true)?;
    clamp_psd(&mut spec, block.frobenius_norm())?;
    let vecs = spec.eigenvectors.as_ref().expect("requested");
    let ensemble: Vec<Vec<Complex<T>>> = spec
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &mu)| vecs.column(k).into_iter().map(|z| z * mu.sqrt()).collect())
        .collect();
    ensemble_lambdas(&ensemble)
}

/// The same values from the Hermitian matrix √m·m̃·√m. Square roots of
/// roundoff-level eigenvalues limit its accuracy on rank-deficient blocks to
/// about √ε; kept as a cross-check.
pub fn block_spectrum_similarity<T: Real>(block: &Matrix<T>) -> Result<[T; 4]> {
    let root = psd_sqrt(block)?;
    let r = root.matmul(&spin_flip(block)).matmul(&root).hermitian_part();
    let spec = hermitian_eigen(&r, false)?;
    let mut out = [T::zero(); 4];
    for (o, lam) in out.iter_mut().zip(spec.eigenvalues) {
        *o = lam.max(T::zero()).sqrt();
    }
    Ok(out)
}

fn ensemble_lambdas<T: Real>(ensemble: &[Vec<Complex<T>>]) -> Result<[T; 4]> {
    let flipped: Vec<Vec<Complex<T>>> = ensemble.iter().map(|v| spin_flip_vector(v)).collect();
    let k = ensemble.len();
    let tau = Matrix::from_fn(k, k, |i, j| inner(&ensemble[i], &flipped[j]));
    let mut lambda = [T::zero(); 4];
    for (l, s) in lambda.iter_mut().zip(singular_values_dilation(&tau)?) {
        *l = s;
    }
    Ok(lambda)
}

/// The same values from the characteristic polynomial of the non-Hermitian
/// product m·m̃.
pub fn block_spectrum_by_roots<T: Real>(block: &Matrix<T>) -> Result<[T; 4]> {
    let prod = block.matmul(&spin_flip(block));
    let roots = quartic_spectrum_oracle(&prod)?;
    let mut out = [T::zero(); 4];
    for (o, lam) in out.iter_mut().zip(roots) {
        *o = lam.max(T::zero()).sqrt();
    }
    Ok(out)
}

/// max{0, λ₁ − λ₂ − λ₃ − λ₄} with roundoff-level results set to zero.
pub fn concurrence_from_roots<T: Real>(lambda: &[T; 4]) -> T {
    let c = lambda[0] - lambda[1] - lambda[2] - lambda[3];
    if c < T::tol(CONCURRENCE_ZERO_TOL) {
        T::zero()
    } else {
        c
    }
}

/// Two-qubit (Wootters) concurrence of a 4×4 PSD matrix, not necessarily of
/// unit trace.
pub fn block_concurrence<T: Real>(block: &Matrix<T>) -> Result<T> {
    Ok(concurrence_from_roots(&block_spectrum(block)?))
}

pub fn component_concurrence<T: Real>(rho: &DensityMatrix<T>, idx: ComponentIndex) -> Result<T> {
    idx.validate(rho.dims())?;
    block_concurrence(&component_submatrix(rho.matrix(), rho.dims(), idx))
}

/// Total τ and every component concurrence C_{pr,p′r′}.
#[derive(Clone, Debug, PartialEq)]
pub struct TauBreakdown<T> {
    pub total: T,
    pub components: Vec<(ComponentIndex, T)>,
}

impl<T: Real> TauBreakdown<T> {
    pub fn component(&self, idx: ComponentIndex) -> Option<T> {
        self.components.iter().find(|(i, _)| *i == idx).map(|&(_, c)| c)
    }
}

pub fn tau<T: Real>(rho: &DensityMatrix<T>) -> Result<TauBreakdown<T>> {
    tau_of_matrix(rho.matrix(), rho.dims())
}

/// τ of a PSD matrix that need not have unit trace (components scale linearly
/// with the trace).
pub fn tau_of_matrix<T: Real>(rho: &Matrix<T>, dims: BipartiteDims) -> Result<TauBreakdown<T>> {
    let components = component_indices(dims)
        .into_iter()
        .map(|idx| Ok((idx, block_concurrence(&component_submatrix(rho, dims, idx))?)))
        .collect::<Result<Vec<_>>>()?;
    let total = components.iter().map(|&(_, c)| c * c).sum();
    Ok(TauBreakdown { total, components })
}

/// C(|ψ⟩) = √(2(1 − Tr ρ_A²)).
pub fn pure_concurrence<T: Real>(psi: &PureState<T>) -> T {
    pure_concurrence_sq(psi).sqrt()
}

pub fn pure_concurrence_sq<T: Real>(psi: &PureState<T>) -> T {
    (T::lit(2.0) * (T::one() - psi.marginal_purity())).max(T::zero())
}

/// ‖v‖²·C²(v/‖v‖) for an unnormalized vector, the contribution of one
/// ensemble member to Σ p_i C²(ψ_i).
fn weighted_pure_c2<T: Real>(v: &[Complex<T>], dims: BipartiteDims) -> T {
    let n2 = v.iter().map(|z| z.norm_sqr()).sum::<T>();
    if n2 <= T::min_positive_value() {
        return T::zero();
    }
    let c = Matrix::from_vec(dims.d1, dims.d2, v.to_vec()).expect("dims match");
    let ra = c.matmul(&c.adjoint());
    let purity_unnorm = ra.matmul(&ra).trace().re;
    (T::lit(2.0) * (n2 - purity_unnorm / n2)).max(T::zero())
}

fn check_fidelity<T: Real>(d: usize, fidelity: T) -> Result<()> {
    if d < 2 {
        return Err(Error::param(format!("dimension {d} < 2")));
    }
    if !(fidelity >= T::zero() && fidelity <= T::one()) {
        return Err(Error::param(format!("fidelity {fidelity} outside [0, 1]")));
    }
    Ok(())
}

/// τ(ρ_F) = 2d/(d−1)·(F − 1/d)² for F > 1/d, else 0.
pub fn isotropic_tau<T: Real>(d: usize, fidelity: T) -> Result<T> {
    check_fidelity(d, fidelity)?;
    let df = T::from_usize(d).unwrap();
    let excess = fidelity - T::one() / df;
    if excess <= T::zero() {
        return Ok(T::zero());
    }
    Ok(T::lit(2.0) * df / (df - T::one()) * excess * excess)
}

/// Tangle (convex roof of C²) of the isotropic state ρ_F.
///
/// The minimal C² over pure states of fidelity F is reached by Schmidt vectors
/// (γ, (1−γ)/(d−1), …) with γ = [√F + √((d−1)(1−F))]²/d. That function is
/// convex up to F = 4(d−1)/d²; beyond it the convex roof follows the chord to
/// the maximally entangled point (1, 2(d−1)/d).
pub fn isotropic_tangle<T: Real>(d: usize, fidelity: T) -> Result<T> {
    check_fidelity(d, fidelity)?;
    let df = T::from_usize(d).unwrap();
    if fidelity <= T::one() / df {
        return Ok(T::zero());
    }
    let two = T::lit(2.0);
    let min_c2 = |f: T| -> T {
        let s = f.sqrt() + ((df - T::one()) * (T::one() - f)).max(T::zero()).sqrt();
        let gamma = (s * s / df).min(T::one());
        let rest = T::one() - gamma;
        (two * (T::one() - gamma * gamma - rest * rest / (df - T::one()))).max(T::zero())
    };
    let knee = T::lit(4.0) * (df - T::one()) / (df * df);
    if fidelity <= knee {
        return Ok(min_c2(fidelity));
    }
    let at_knee = min_c2(knee);
    let at_one = two * (df - T::one()) / df;
    Ok(at_knee + (fidelity - knee) * (at_one - at_knee) / (T::one() - knee))
}

pub fn tangle_upper_estimate<T: Real>(rho: &DensityMatrix<T>, trials: usize, seed: u64) -> Result<T> {
    tangle_upper_estimate_with(rho, trials, &mut seeded(seed))
}

/// Upper estimate of the tangle τ′(ρ) = min Σ p_i C²(ψ_i).
///
/// Decompositions are the rows of U·(√μ_k|e_k⟩) for n×rank isometries U. The
/// search starts from the eigen-ensemble (U = 1), samples `trials` Haar-random
/// isometries with n = rank, rank+1, rank+2, then spends another `trials`
/// steps refining the best one by small random unitary rotations. Every
/// candidate is a valid decomposition, so the result never undershoots τ′.
pub fn tangle_upper_estimate_with<T: Real, R: Rng + ?Sized>(
    rho: &DensityMatrix<T>,
    trials: usize,
    rng: &mut R,
) -> Result<T> {
    if trials == 0 {
        return Err(Error::param("tangle estimate needs at least one trial"));
    }
    let dims = rho.dims();
    let spec = rho.spectrum(true)?;
    let vecs = spec.eigenvectors.as_ref().expect("requested");
    let ensemble: Vec<Vec<Complex<T>>> = spec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > T::tol(RANK_TOL))
        .map(|(k, &mu)| vecs.column(k).into_iter().map(|z| z * mu.sqrt()).collect())
        .collect();
    let rank = ensemble.len();
    if rank == 0 {
        return Err(Error::InvalidState("state has no support".into()));
    }
    let value_of = |u: &Matrix<T>| -> T {
        let mut value = T::zero();
        let mut psi = vec![Complex::zero(); dims.total()];
        for i in 0..u.rows() {
            psi.iter_mut().for_each(|x| *x = Complex::zero());
            for (k, w) in ensemble.iter().enumerate() {
                let coef = u[(i, k)];
                for (x, y) in psi.iter_mut().zip(w) {
                    *x = *x + coef * y;
                }
            }
            value = value + weighted_pure_c2(&psi, dims);
        }
        value
    };

    let mut best_u = Matrix::identity(rank);
    let mut best = value_of(&best_u);
    if rank == 1 {
        return Ok(best);
    }
    for t in 0..trials {
        let u = random_isometry(rank + t % 3, rank, rng);
        let value = value_of(&u);
        if value < best {
            best = value;
            best_u = u;
        }
    }

    let mut step = T::lit(0.2);
    for _ in 0..trials {
        let n = best_u.rows();
        let g = gaussian_matrix::<T, R>(n, n, rng).scale(step);
        let w = orthonormalize_columns(&(&Matrix::identity(n) + &g));
        let candidate = w.matmul(&best_u);
        let value = value_of(&candidate);
        if value < best {
            best = value;
            best_u = candidate;
            step = (step * T::lit(1.5)).min(T::one());
        } else {
            step = (step * T::lit(0.9)).max(T::lit(1e-3));
        }
    }
    Ok(best)
}

/// Two-qubit concurrence from any pure-state ensemble {|v_i⟩} (unnormalized,
/// Σ|v_i⟩⟨v_i| = ρ).
pub fn ensemble_concurrence<T: Real>(ensemble: &[Vec<Complex<T>>]) -> Result<T> {
    if ensemble.is_empty() || ensemble.iter().any(|v| v.len() != 4) {
        return Err(Error::param("ensemble concurrence needs two-qubit vectors"));
    }
    Ok(concurrence_from_roots(&ensemble_lambdas(ensemble)?))
}

/// σ_y⊗σ_y |v*⟩
fn spin_flip_vector<T: Real>(v: &[Complex<T>]) -> Vec<Complex<T>> {
    const SIGN: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
    (0..4).map(|i| v[3 - i].conj() * T::lit(SIGN[i])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::states::{haar_random_pure_with, isotropic, max_entangled, random_mixed_with, werner};

    fn dims(d: usize) -> BipartiteDims {
        BipartiteDims::square(d).unwrap()
    }

    #[test]
    fn component_count_matches_formula() {
        for (d1, d2) in [(2, 2), (3, 3), (2, 4), (4, 4)] {
            let dm = BipartiteDims::new(d1, d2).unwrap();
            assert_eq!(component_indices(dm).len(), d1 * d2 * (d1 - 1) * (d2 - 1) / 4);
        }
    }

    #[test]
    fn index_validation() {
        let idx = ComponentIndex::new(1, 0, 0, 1);
        assert!(matches!(idx.validate(dims(3)), Err(Error::IndexOutOfRange(_))));
        assert!(ComponentIndex::new(0, 3, 0, 1).validate(dims(3)).is_err());
        let rho = isotropic::<f64>(3, 0.5).unwrap();
        assert!(component_concurrence(&rho, ComponentIndex::new(0, 1, 1, 3)).is_err());
    }

    #[test]
    fn maximally_mixed_has_no_components() {
        let rho = isotropic::<f64>(3, 1.0 / 9.0).unwrap();
        let t = tau(&rho).unwrap();
        assert!(t.components.iter().all(|&(_, c)| c == 0.0));
        assert_eq!(t.total, 0.0);
    }

    #[test]
    fn pure_components_follow_schmidt_weights() {
        let omega: [f64; 3] = [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0];
        let psi = PureState::<f64>::from_schmidt(&omega).unwrap();
        let t = tau(&psi.density()).unwrap();
        for &(idx, c) in &t.components {
            let expected = if idx.is_diagonal() {
                2.0 * (omega[idx.p] * omega[idx.r]).sqrt()
            } else {
                0.0
            };
            assert!((c - expected).abs() < 1e-9, "{idx:?}: {c} vs {expected}");
        }
        assert!((t.total - 1.0).abs() < 1e-9);
        assert!((pure_concurrence(&psi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spin_flip_matches_generator_construction() {
        let mut rng = seeded(8);
        let d = dims(3);
        let rho = random_mixed_with::<f64, _>(d, 9, &mut rng).unwrap();
        for idx in component_indices(d) {
            let full = spin_flip_full(rho.matrix(), d, idx);
            let block = component_submatrix(&full, d, idx);
            let direct = spin_flip(&component_submatrix(rho.matrix(), d, idx));
            assert!(block.max_abs_diff(&direct) < 1e-15);
            // the generator form vanishes outside the selected levels
            let keep = idx.basis_indices(d);
            for i in 0..9 {
                for j in 0..9 {
                    if !keep.contains(&i) || !keep.contains(&j) {
                        assert_eq!(full[(i, j)], Complex::zero());
                    }
                }
            }
        }
    }

    #[test]
    fn isotropic_tau_values() {
        assert_eq!(isotropic_tau(3, 1.0 / 3.0).unwrap(), 0.0);
        assert!((isotropic_tau(3, 8.0f64 / 9.0).unwrap() - 25.0 / 27.0).abs() < 1e-15);
        assert!((isotropic_tau(3, 2.0f64 / 3.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        for d in 2..=5 {
            let v = isotropic_tau(d, 1.0).unwrap();
            assert!((v - 2.0 * (d as f64 - 1.0) / d as f64).abs() < 1e-14);
        }
        assert!(isotropic_tau(3, 1.2f64).is_err());
    }

    #[test]
    fn generic_tau_on_isotropic_states() {
        for f in [0.2, 0.5, 2.0 / 3.0, 8.0 / 9.0, 1.0] {
            let rho = isotropic::<f64>(3, f).unwrap();
            let t = tau(&rho).unwrap().total;
            assert!((t - isotropic_tau(3, f).unwrap()).abs() < 1e-9, "F={f}: {t}");
        }
    }

    #[test]
    fn tau_of_max_entangled() {
        for d in 2..=4 {
            let t = tau(&max_entangled::<f64>(d).unwrap().density()).unwrap().total;
            assert!((t - 2.0 * (d as f64 - 1.0) / d as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn isotropic_tangle_properties() {
        // two qubits: tangle = C² = (2F − 1)²
        for f in [0.5, 0.6, 0.8, 1.0] {
            let v = isotropic_tangle(2, f).unwrap();
            assert!((v - (2.0 * f - 1.0f64).max(0.0).powi(2)).abs() < 1e-12);
        }
        // knee for d = 3 sits at F = 8/9 with value 1 (Schmidt weights 2/3, 1/6, 1/6)
        assert!((isotropic_tangle(3, 8.0f64 / 9.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((isotropic_tangle(3, 1.0f64).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(isotropic_tangle(3, 0.3).unwrap(), 0.0);
        for d in 2..=5 {
            for k in 0..=50 {
                let f = k as f64 / 50.0;
                assert!(isotropic_tangle(d, f).unwrap() + 1e-12 >= isotropic_tau(d, f).unwrap());
            }
        }
    }

    #[test]
    fn tangle_estimate_of_pure_state_is_exact() {
        let mut rng = seeded(2);
        let psi = haar_random_pure_with::<f64, _>(dims(3), &mut rng);
        let est = tangle_upper_estimate(&psi.density(), 5, 1).unwrap();
        assert!((est - pure_concurrence_sq(&psi)).abs() < 1e-9);
        assert!(tangle_upper_estimate(&psi.density(), 0, 1).is_err());
    }

    #[test]
    fn tangle_estimate_of_isotropic_state() {
        let rho = isotropic::<f64>(3, 8.0 / 9.0).unwrap();
        let est = tangle_upper_estimate(&rho, 2000, 3).unwrap();
        assert!(est >= 25.0 / 27.0 - 1e-9);
        assert!(est >= isotropic_tangle(3, 8.0 / 9.0).unwrap() - 1e-9);
    }

    #[test]
    fn two_qubit_werner() {
        // singlet fidelity (1+μ)/(4−2μ); concurrence max{0, 2F − 1}
        for mu in [0.0, 0.3, 0.5, 0.7, 1.0] {
            let rho = werner::<f64>(2, mu).unwrap();
            let f = (1.0 + mu) / (4.0 - 2.0 * mu);
            let c = (2.0 * f - 1.0f64).max(0.0);
            assert!((tau(&rho).unwrap().total - c * c).abs() < 1e-9, "mu={mu}");
        }
    }

    #[test]
    fn ensemble_concurrence_of_bell_state() {
        let phi = max_entangled::<f64>(2).unwrap();
        let c = ensemble_concurrence(&[phi.amplitudes().to_vec()]).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn root_route_agrees_on_full_rank_blocks() {
        let mut rng = seeded(31);
        let d = dims(3);
        for _ in 0..20 {
            let rho = random_mixed_with::<f64, _>(d, 9, &mut rng).unwrap();
            for idx in component_indices(d) {
                let block = component_submatrix(rho.matrix(), d, idx);
                let a = block_spectrum(&block).unwrap();
                let b = block_spectrum_by_roots(&block).unwrap();
                let c = block_spectrum_similarity(&block).unwrap();
                for ((x, y), z) in a.iter().zip(&b).zip(&c) {
                    assert!((x - y).abs() < 1e-7, "{a:?} vs {b:?}");
                    assert!((x - z).abs() < 1e-7, "{a:?} vs {c:?}");
                }
            }
        }
    }

    #[test]
    fn tau_in_f32() {
        let phi = max_entangled::<f32>(2).unwrap();
        let t = tau(&phi.density()).unwrap().total;
        assert!((t - 1.0).abs() < 1e-4);
    }
}
