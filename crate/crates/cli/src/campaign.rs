//! The Monte Carlo verification campaign behind `ctau verify`.
//!
//! Every case draws from its own substream `(seed, check, index)`, and the
//! per-check aggregation only counts and takes maxima, so the report does not
//! depend on thread scheduling.

use std::time::Instant;

use ctau::bounds::{
    block_spectrum, block_spectrum_by_roots, block_spectrum_similarity, component_indices, component_submatrix,
    ensemble_concurrence, isotropic_tangle, isotropic_tau, pure_concurrence_sq, tangle_upper_estimate, tau,
};
use ctau::channels::{apply_one_sided, choi, filter_map};
use ctau::dynamics::{
    bisect_death, check_mixed_bound, check_pure_bounds, closed_form_tau, component_evolution_check, death_family_curve,
    isotropic_closed_form, sudden_death_threshold, tangle_dynamics_check, ChannelFamily, DeathFamily, Tangle,
    BOUND_SLACK,
};
use ctau::linalg::Matrix;
use ctau::rng::{haar_unitary, random_isometry, substream, uniform, SeededRng};
use ctau::states::{haar_random_pure_with, isotropic, random_mixed_with};
use ctau::{BipartiteDims, DensityMatrix, Error as CoreError, PureState, QuantumChannel, C64};
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::{emit, to_json, BISECTION_TOL, THRESHOLD_AGREEMENT};
use crate::config::RunConfig;
use crate::error::CliError;

pub const DIMENSIONS: [usize; 3] = [2, 3, 4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Must never fail; any failure makes `verify` exit nonzero.
    Hard,
    /// Relies on Monte Carlo tangle estimates; failures are logged only.
    Soft,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub kind: CheckKind,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// First error raised by a case (lowest case index), if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputError {
    pub input: &'static str,
    pub class: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub trials: usize,
    pub dimensions: Vec<usize>,
    pub hard_failures: usize,
    pub soft_failures: usize,
    pub checks: Vec<CheckOutcome>,
    pub input_errors: Vec<InputError>,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.hard_failures == 0
    }
}

type CaseFn<'a> = dyn Fn(&mut SeededRng, usize) -> Result<f64, CoreError> + Sync + 'a;

struct Campaign {
    seed: u64,
    checks: Vec<CheckOutcome>,
}

impl Campaign {
    /// Runs `cases` independent cases; each returns a deviation that must not
    /// exceed `tolerance`. An error counts as a failure.
    fn run(&mut self, name: &'static str, kind: CheckKind, tolerance: f64, cases: usize, case: &CaseFn<'_>) {
        let stream = self.checks.len() as u64;
        let seed = self.seed;
        let results: Vec<Result<f64, CoreError>> = (0..cases)
            .into_par_iter()
            .map(|i| case(&mut substream(seed, stream, i as u64), i))
            .collect();
        let mut out = CheckOutcome {
            name,
            kind,
            cases,
            passed: 0,
            failed: 0,
            max_deviation: 0.0,
            tolerance,
            first_error: None,
        };
        for r in results {
            match r {
                Ok(dev) if dev.is_finite() => {
                    out.max_deviation = out.max_deviation.max(dev);
                    if dev <= tolerance {
                        out.passed += 1;
                    } else {
                        out.failed += 1;
                    }
                }
                Ok(dev) => {
                    out.failed += 1;
                    out.first_error
                        .get_or_insert_with(|| format!("non-finite deviation {dev}"));
                }
                Err(e) => {
                    out.failed += 1;
                    out.first_error.get_or_insert_with(|| e.to_string());
                }
            }
        }
        self.checks.push(out);
    }
}

fn square(d: usize) -> BipartiteDims {
    BipartiteDims::square(d).expect("d ≥ 2")
}

fn dim_of(i: usize) -> usize {
    DIMENSIONS[i % DIMENSIONS.len()]
}

/// Uniform point on the probability simplex.
fn random_weights(d: usize, rng: &mut SeededRng) -> Vec<f64> {
    let raw: Vec<f64> = (0..d).map(|_| -uniform(rng).max(1e-300).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

/// Measure-and-prepare channel X ↦ Σ_k ⟨k|X|k⟩ |φ_k⟩⟨φ_k|, entanglement breaking.
fn measure_prepare(d: usize, rng: &mut SeededRng) -> Result<QuantumChannel, CoreError> {
    let kraus = (0..d)
        .map(|k| {
            let phi = haar_unitary::<f64, _>(d, rng).column(0);
            Matrix::from_fn(d, d, |i, j| if j == k { phi[i] } else { C64::new(0.0, 0.0) })
        })
        .collect();
    QuantumChannel::new(kraus)
}

fn random_product(dims: BipartiteDims, rng: &mut SeededRng) -> Result<DensityMatrix, CoreError> {
    let a = haar_unitary::<f64, _>(dims.d1, rng).column(0);
    let b = haar_unitary::<f64, _>(dims.d2, rng).column(0);
    let amps = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
    Ok(PureState::new(dims, amps)?.density())
}

fn positive_part(x: f64) -> f64 {
    x.max(0.0)
}

fn eps_in_unit(rng: &mut SeededRng) -> f64 {
    uniform(rng)
}

pub fn run_campaign(cfg: &RunConfig) -> Result<CampaignReport, CliError> {
    let n = cfg.trials;
    let mut c = Campaign {
        seed: cfg.seed,
        checks: Vec::new(),
    };
    let hard = CheckKind::Hard;

    c.run("pure_state_identity", hard, 1e-9, 3 * n, &|rng, i| {
        let psi = haar_random_pure_with::<f64, _>(square(dim_of(i)), rng);
        Ok((tau(&psi.density())?.total - pure_concurrence_sq(&psi)).abs())
    });

    c.run("convexity", hard, 1e-9, 3 * n, &|rng, i| {
        let d = dim_of(i);
        let a = random_mixed_with::<f64, _>(square(d), 1 + i % (d * d), rng)?;
        let b = haar_random_pure_with::<f64, _>(square(d), rng).density();
        let t = uniform(rng);
        let mix = DensityMatrix::mix(&[(t, &a), (1.0 - t, &b)])?;
        let rhs = t * tau(&a)?.total + (1.0 - t) * tau(&b)?.total;
        Ok(positive_part(tau(&mix)?.total - rhs))
    });

    c.run("separable_zero", hard, 1e-9, 3 * n, &|rng, i| {
        let dims = square(dim_of(i));
        let terms = 1 + i % 5;
        let parts = (0..terms)
            .map(|_| random_product(dims, rng))
            .collect::<Result<Vec<_>, _>>()?;
        let w = 1.0 / terms as f64;
        let weighted: Vec<(f64, &DensityMatrix)> = parts.iter().map(|p| (w, p)).collect();
        Ok(tau(&DensityMatrix::mix(&weighted)?)?.total)
    });

    // τ on 2⊗2 against C² from a random (non-eigen) decomposition of ρ
    c.run("two_qubit_exactness", hard, 1e-9, n, &|rng, i| {
        let rho = random_mixed_with::<f64, _>(square(2), 1 + i % 4, rng)?;
        let spec = rho.spectrum(true)?;
        let vecs = spec.eigenvectors.as_ref().expect("requested eigenvectors");
        let rank = 4;
        let extra = i % 3;
        let u = random_isometry::<f64, _>(rank + extra, rank, rng);
        let ensemble: Vec<Vec<C64>> = (0..rank + extra)
            .map(|a| {
                (0..4)
                    .map(|row| {
                        (0..rank)
                            .map(|k| u[(a, k)] * vecs[(row, k)] * spec.eigenvalues[k].max(0.0).sqrt())
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let c = ensemble_concurrence(&ensemble)?;
        Ok((tau(&rho)?.total - c * c).abs())
    });

    c.run("spectrum_routes", hard, 1e-7, n, &|rng, i| {
        let dims = square(3);
        let rho = random_mixed_with::<f64, _>(dims, 9, rng)?;
        let idx = component_indices(dims)[i % 9];
        let block = component_submatrix(rho.matrix(), dims, idx);
        let a = block_spectrum(&block)?;
        let b = block_spectrum_by_roots(&block)?;
        let s = block_spectrum_similarity(&block)?;
        Ok((0..4)
            .map(|k| (a[k] - b[k]).abs().max((a[k] - s[k]).abs()))
            .fold(0.0, f64::max))
    });

    c.run("two_qubit_factorization", hard, 1e-8, n, &|rng, i| {
        let psi = haar_random_pure_with::<f64, _>(square(2), rng);
        let ch = QuantumChannel::random(2, 1 + i % 4, rng)?;
        let c_out = tau(&apply_one_sided(&ch, &psi.density())?)?.total.sqrt();
        let c_choi = tau(&choi(&ch)?.state)?.total.sqrt();
        Ok((c_out - c_choi * pure_concurrence_sq(&psi).sqrt()).abs())
    });

    c.run("component_evolution_law", hard, 1e-8, n, &|rng, i| {
        let d = dim_of(i);
        let psi = haar_random_pure_with::<f64, _>(square(d), rng);
        let ch = QuantumChannel::random(d, 1 + i % 4, rng)?;
        component_evolution_check(&psi, &ch)
    });

    c.run("pure_bounds_sandwich", hard, BOUND_SLACK, 3 * n, &|rng, i| {
        let d = dim_of(i);
        let psi = haar_random_pure_with::<f64, _>(square(d), rng);
        let ch = QuantumChannel::random(d, 1 + (i / 3) % 4, rng)?;
        Ok(positive_part(check_pure_bounds(&psi, &ch)?.excess()))
    });

    c.run("tau_breaking_channels", hard, 1e-9, n, &|rng, i| {
        let d = dim_of(i);
        let ch = if i % 4 == 3 {
            // depolarizing at or past d/(d+1)
            let start = d as f64 / (d as f64 + 1.0);
            QuantumChannel::depolarizing(d, start + (1.0 - start) * uniform(rng))?
        } else {
            measure_prepare(d, rng)?
        };
        let choi_tau = tau(&choi(&ch)?.state)?.total;
        let psi = haar_random_pure_with::<f64, _>(square(d), rng);
        Ok(choi_tau.max(tau(&apply_one_sided(&ch, &psi.density())?)?.total))
    });

    c.run("closed_form_agreement", hard, 1e-8, 3 * n, &|rng, i| {
        let d = dim_of(i);
        let family = if (i / 3) % 2 == 0 {
            ChannelFamily::Depolarizing
        } else {
            ChannelFamily::PhaseDamping
        };
        let omega = random_weights(d, rng);
        let eps = eps_in_unit(rng);
        let psi = PureState::from_schmidt(&omega)?;
        let generic = tau(&apply_one_sided(&family.channel(d, eps)?, &psi.density())?)?.total;
        Ok((generic - closed_form_tau(family, &omega, eps)?).abs())
    });

    c.run("closed_form_monotone", hard, 1e-10, 3 * n, &|rng, i| {
        let d = dim_of(i);
        let family = if (i / 3) % 2 == 0 {
            ChannelFamily::Depolarizing
        } else {
            ChannelFamily::PhaseDamping
        };
        let omega = random_weights(d, rng);
        let (a, b) = (eps_in_unit(rng), eps_in_unit(rng));
        let (lo, hi) = (a.min(b), a.max(b));
        let psi = PureState::from_schmidt(&omega)?.density();
        let at = |e: f64| -> Result<f64, CoreError> { Ok(tau(&apply_one_sided(&family.channel(d, e)?, &psi)?)?.total) };
        Ok(positive_part(at(hi)? - at(lo)?))
    });

    // analytic thresholds against bisection on the closed form and the generic
    // pipeline just before/after; deterministic, independent of --trials
    let threshold_cases: Vec<(DeathFamily, usize, Option<f64>)> = (2..=6)
        .map(|d| (DeathFamily::DepolarizingPure, d, None))
        .chain((2..=4).map(|d| (DeathFamily::PhaseDampingPure, d, None)))
        .chain((0..=10).map(|k| {
            (
                DeathFamily::DepolarizingIsotropic,
                3,
                Some((0.4 + 0.06 * k as f64).min(1.0)),
            )
        }))
        .collect();
    c.run(
        "threshold_consistency",
        hard,
        THRESHOLD_AGREEMENT,
        threshold_cases.len(),
        &|_, i| {
            let (family, d, f) = threshold_cases[i];
            let numeric = bisect_death(|e| death_family_curve(family, d, f, e), 0.0, BISECTION_TOL)?;
            let generic = |e: f64| -> Result<f64, CoreError> {
                let (rho, ch) = match family {
                    DeathFamily::DepolarizingIsotropic => {
                        (isotropic(d, f.unwrap())?, ChannelFamily::Depolarizing.channel(d, e)?)
                    }
                    DeathFamily::DepolarizingPure => (
                        ctau::states::max_entangled(d)?.density(),
                        ChannelFamily::Depolarizing.channel(d, e)?,
                    ),
                    DeathFamily::PhaseDampingPure => (
                        ctau::states::max_entangled(d)?.density(),
                        ChannelFamily::PhaseDamping.channel(d, e)?,
                    ),
                };
                Ok(tau(&apply_one_sided(&ch, &rho)?)?.total)
            };
            match (sudden_death_threshold(family, d, f)?, numeric) {
                (Some(a), Some(nu)) => {
                    let mut dev = (a - nu).abs();
                    // alive just before, dead just after, in the generic pipeline
                    if a > 1e-3 && generic(a - 1e-3)? <= 1e-12 {
                        dev = f64::INFINITY;
                    }
                    if a + 1e-3 <= 1.0 && generic(a + 1e-3)? > 1e-12 {
                        dev = f64::INFINITY;
                    }
                    Ok(dev)
                }
                (None, Some(nu)) => Ok(if generic(1.0 - 1e-3)? > 0.0 {
                    (1.0 - nu).abs()
                } else {
                    f64::INFINITY
                }),
                _ => Ok(f64::INFINITY),
            }
        },
    );

    c.run("jamiolkowski_filter", hard, 1e-9, n, &|rng, i| {
        let d = 2 + i % 2;
        let omega = random_weights(d, rng);
        let ch = QuantumChannel::random(d, 1 + i % 4, rng)?;
        let psi = PureState::from_schmidt(&omega)?;
        let f = filter_map(&omega, &choi(&ch)?)?;
        let direct = apply_one_sided(&ch, &psi.density())?;
        let entry = f.state.matrix().max_abs_diff(direct.matrix());
        // trace-preserving channel: p′ = 1
        let p_rel = (f.p_prime - 1.0).abs();
        Ok(entry.max(p_rel))
    });

    let iso_grid: Vec<(f64, f64)> = (0..=6)
        .flat_map(|k| (0..51).map(move |j| ((0.4 + 0.1 * k as f64).min(1.0), j as f64 / 50.0)))
        .collect();
    c.run("isotropic_mixed_bound", hard, BOUND_SLACK, iso_grid.len(), &|_, i| {
        let (f, eps) = iso_grid[i];
        let rho = isotropic(3, f)?;
        let ch = QuantumChannel::depolarizing(3, eps)?;
        match check_mixed_bound(&rho, &ch, Tangle::Exact(isotropic_tangle(3, f)?)) {
            Ok(r) => Ok(positive_part(r.tau_out - r.bound)),
            Err(CoreError::BoundViolation { lhs, rhs, .. }) => Ok(lhs - rhs),
            Err(e) => Err(e),
        }
    });

    c.run("isotropic_consistency", hard, 1e-8, 3 * n, &|rng, i| {
        let d = dim_of(i);
        let f = uniform(rng);
        let eps = eps_in_unit(rng);
        let rho = isotropic(d, f)?;
        let at_rest = (tau(&rho)?.total - isotropic_tau(d, f)?).abs();
        let out = tau(&apply_one_sided(&QuantumChannel::depolarizing(d, eps)?, &rho)?)?.total;
        Ok(at_rest.max((out - isotropic_closed_form(d, f, eps)?).abs()))
    });

    c.run("pure_local_unitary_invariance", hard, 1e-8, 3 * n, &|rng, i| {
        let d = dim_of(i);
        let psi = haar_random_pure_with::<f64, _>(square(d), rng);
        let u = haar_unitary(d, rng);
        let v = haar_unitary(d, rng);
        let moved = psi.apply_local(&u, &v)?;
        Ok((tau(&psi.density())?.total - tau(&moved.density())?.total).abs())
    });

    c.run("isotropic_twirl_invariance", hard, 1e-8, 3 * n, &|rng, i| {
        let d = dim_of(i);
        let rho = isotropic(d, uniform(rng))?;
        let u = haar_unitary(d, rng);
        let moved = rho.apply_local(&u, &u.conj())?;
        Ok((tau(&rho)?.total - tau(&moved)?.total).abs())
    });

    // at 2⊗2 every tangle is exact (tangle = τ), so the tangle law is hard there
    c.run("two_qubit_tangle_dynamics", hard, BOUND_SLACK, n, &|rng, i| {
        let psi = haar_random_pure_with::<f64, _>(square(2), rng);
        let ch = QuantumChannel::random(2, 1 + i % 4, rng)?;
        let r = tangle_dynamics_check(&psi.density(), &ch, 8, i as u64)?;
        if !r.exact {
            return Ok(f64::INFINITY);
        }
        Ok(positive_part(r.tangle_out - r.bound))
    });

    // soft: tangles of generic mixed 3⊗3 states are Monte Carlo upper estimates
    let soft = CheckKind::Soft;
    c.run(
        "mixed_bound_estimated_tangle",
        soft,
        BOUND_SLACK,
        n.div_ceil(2),
        &|rng, i| {
            let rho = random_mixed_with::<f64, _>(square(3), 2, rng)?;
            let ch = QuantumChannel::random(3, 1 + i % 3, rng)?;
            let t0 = tangle_upper_estimate(&rho, 64, i as u64)?;
            let r = check_mixed_bound(&rho, &ch, Tangle::Estimate(t0))?;
            Ok(positive_part(r.tau_out - r.bound))
        },
    );

    c.run(
        "tangle_dynamics_estimated",
        soft,
        BOUND_SLACK,
        n.div_ceil(5),
        &|rng, i| {
            let rho = random_mixed_with::<f64, _>(square(3), 2, rng)?;
            let ch = QuantumChannel::random(3, 1 + i % 3, rng)?;
            let r = tangle_dynamics_check(&rho, &ch, 32, i as u64)?;
            Ok(positive_part(r.tangle_out - r.bound))
        },
    );

    let input_errors = if cfg.inject_invalid {
        injected_inputs()
    } else {
        Vec::new()
    };

    let count = |k: CheckKind| c.checks.iter().filter(|x| x.kind == k).map(|x| x.failed).sum();
    Ok(CampaignReport {
        seed: cfg.seed,
        trials: n,
        dimensions: DIMENSIONS.to_vec(),
        hard_failures: count(CheckKind::Hard),
        soft_failures: count(CheckKind::Soft),
        input_errors,
        checks: c.checks,
    })
}

/// Deliberately corrupted inputs: they must be rejected at construction and
/// reported as input errors, never reach a bound check.
fn injected_inputs() -> Vec<InputError> {
    let dims = square(2);
    // Hermitian, unit trace, eigenvalues {1.5, −0.5, 0, 0}
    let mut m = Matrix::<f64>::zeros(4, 4);
    m[(0, 0)] = C64::new(0.5, 0.0);
    m[(3, 3)] = C64::new(0.5, 0.0);
    m[(0, 3)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(1.0, 0.0);
    let outcome = DensityMatrix::new(dims, m).and_then(|rho| tau(&rho).map(|_| ()));
    let (class, message) = match outcome {
        Err(e) if e.is_invalid_object() => ("invalid_object", e.to_string()),
        Err(e) => ("other", e.to_string()),
        Ok(()) => ("accepted", "corrupted matrix was not rejected".to_string()),
    };
    vec![InputError {
        input: "non_psd_two_qubit_matrix",
        class,
        message,
    }]
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<(), CliError> {
    let start = Instant::now();
    let report = run_campaign(cfg)?;
    eprintln!(
        "verify: {} checks, {} hard / {} soft failures, {:.2} s",
        report.checks.len(),
        report.hard_failures,
        report.soft_failures,
        start.elapsed().as_secs_f64()
    );
    emit(cfg, &to_json(&report)?)?;
    if report.input_errors.iter().any(|e| e.class != "invalid_object") {
        return Err(CliError::Assertion(
            "a corrupted input was not rejected as invalid".into(),
        ));
    }
    if !report.passed() {
        return Err(CliError::Assertion(format!(
            "{} hard check failures",
            report.hard_failures
        )));
    }
    Ok(())
}
