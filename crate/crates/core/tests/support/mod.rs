//! Independent reference implementations built on nalgebra. Nothing here
//! calls into the numerical routines of the crate under test.
#![allow(dead_code)]

use ctau::{ComplexMatrix, C64};
use nalgebra::{DMatrix, DVector};

pub fn to_na(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sigma_yy() -> DMatrix<C64> {
    let i = C64::new(0.0, 1.0);
    let y = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)]);
    y.kronecker(&y)
}

/// Two-qubit concurrence (Wootters) of a 4×4 PSD matrix of any trace.
///
/// ρ is split into subnormalized vectors |v_i⟩ = √μ_i|e_i⟩ with nalgebra's
/// Hermitian eigensolver; the λ's are the singular values of the symmetric
/// matrix ⟨v_i|σ_y⊗σ_y|v_j*⟩. Zero eigenvalues give exact zero rows, so
/// rank-deficient inputs are handled without square roots of roundoff.
pub fn wootters(rho: &DMatrix<C64>) -> f64 {
    assert_eq!(rho.shape(), (4, 4));
    let herm = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let vs: Vec<DVector<C64>> = (0..4)
        .map(|k| eig.eigenvectors.column(k) * C64::new(eig.eigenvalues[k].max(0.0).sqrt(), 0.0))
        .collect();
    let yy = sigma_yy();
    let flipped: Vec<DVector<C64>> = vs.iter().map(|v| &yy * v.conjugate()).collect();
    let tau = DMatrix::from_fn(4, 4, |i, j| vs[i].dotc(&flipped[j]));
    let mut sv: Vec<f64> = tau.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (sv[0] - sv[1] - sv[2] - sv[3]).max(0.0)
}

/// C²(ψ) = 2(1 − Σσ⁴) from the singular values of the coefficient matrix.
pub fn pure_concurrence_sq(amplitudes: &[C64], d1: usize, d2: usize) -> f64 {
    let c = DMatrix::from_row_slice(d1, d2, amplitudes);
    let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    let s4: f64 = c.singular_values().iter().map(|s| s.powi(4)).sum();
    2.0 * (1.0 - s4 / (norm2 * norm2))
}

/// Σ_k (1⊗K_k) ρ (1⊗K_k)† by explicit Kronecker products.
pub fn evolve(rho: &DMatrix<C64>, d1: usize, kraus: &[ComplexMatrix]) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(d1, d1);
    let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
    for k in kraus {
        let big = id.kronecker(&to_na(k));
        out += &big * rho * big.adjoint();
    }
    out
}

/// Numerical convex roof of C² for the d⊗d isotropic family at fidelity F.
///
/// Scans Schmidt vectors on a simplex grid: a pure state with weights ω reaches
/// every fidelity up to (Σ√ω_i)²/d, so the minimal C² at fidelity F is the
/// minimum over ω with (Σ√ω_i)²/d ≥ F. The lower convex hull of that curve
/// (anchored at zero for F ≤ 1/d) is the tangle of the twirl-invariant state.
pub fn isotropic_tangle_numeric(d: usize, fidelities: &[f64], resolution: usize) -> Vec<f64> {
    assert!(d == 2 || d == 3, "simplex scan implemented for d ≤ 3");
    let bins = 2000;
    let mut q = vec![f64::INFINITY; bins + 1];
    let mut visit = |omega: &[f64]| {
        let s: f64 = omega.iter().map(|w| w.sqrt()).sum();
        let fmax = s * s / d as f64;
        let c2 = 2.0 * (1.0 - omega.iter().map(|w| w * w).sum::<f64>());
        let top = ((fmax * bins as f64 + 1e-9).floor() as usize).min(bins);
        // minimal C² is nondecreasing in F: record at the largest reachable bin
        if c2 < q[top] {
            q[top] = c2;
        }
    };
    for a in 0..=resolution {
        let x = a as f64 / resolution as f64;
        if d == 2 {
            visit(&[x, 1.0 - x]);
            continue;
        }
        for b in 0..=(resolution - a) {
            let y = b as f64 / resolution as f64;
            visit(&[x, y, (1.0 - x - y).max(0.0)]);
        }
    }
    // suffix minimum: fidelity F is reachable by anything with fmax ≥ F
    for k in (0..bins).rev() {
        q[k] = q[k].min(q[k + 1]);
    }
    let pts: Vec<(f64, f64)> = (0..=bins)
        .map(|k| {
            let f = k as f64 / bins as f64;
            (f, if f <= 1.0 / d as f64 { 0.0 } else { q[k] })
        })
        .collect();
    let hull = lower_hull(&pts);
    fidelities
        .iter()
        .map(|&f| {
            let i = hull.partition_point(|p| p.0 < f).clamp(1, hull.len() - 1);
            let (a, b) = (hull[i - 1], hull[i]);
            a.1 + (f - a.0) * (b.1 - a.1) / (b.0 - a.0)
        })
        .collect()
}

fn lower_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}
