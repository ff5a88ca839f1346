//! Evolution of τ under one-sided channels (1⊗E): the component factorization
//! law, upper/lower bounds for pure inputs, the mixed-state and tangle bounds,
//! closed-form decay curves and sudden-death thresholds.
//!
//! Pure-input checks run in the Schmidt frame of the input. Writing
//! |ψ⟩ = (U⊗V)Σ_k √ω_k|kk⟩, the output (1⊗E)|ψ⟩⟨ψ| equals (U⊗1)·[(1⊗E∘V)|ψ_c⟩⟨ψ_c|]·(U⊗1)†,
//! and component concurrences are evaluated on the bracketed state with the
//! channel E∘V. Inputs already in Schmidt form (diagonal, nonnegative
//! coefficient matrix) are used as given.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    component_concurrence, component_indices, isotropic_tangle, tangle_upper_estimate, tau, ComponentIndex, RANK_TOL,
};
use crate::channels::{apply_one_sided, choi, QuantumChannel};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::states::{isotropic, schmidt, BipartiteDims, DensityMatrix, PureState};

/// Slack used when asserting the pure-state and mixed-state bounds.
pub const BOUND_SLACK: f64 = 1e-8;
/// τ below this counts as dead.
pub const DEATH_TOL: f64 = 1e-12;
/// Products ω_pω_r at or below this are treated as zero when forming η.
pub const ETA_PAIR_TOL: f64 = 1e-12;
/// Entries below this decide that a coefficient matrix is already in Schmidt form.
const SCHMIDT_FORM_TOL: f64 = 1e-14;

/// A pure input rewritten as Σ √ω_k |kk⟩ together with the channel it meets.
#[derive(Clone, Debug)]
pub struct SchmidtFrame<T> {
    pub omega: Vec<T>,
    pub state: PureState<T>,
    pub channel: QuantumChannel<T>,
    /// False when the input was already in Schmidt form.
    pub rotated: bool,
}

fn require_square_channel<T: Real>(dims: BipartiteDims, ch: &QuantumChannel<T>) -> Result<usize> {
    if !dims.is_square() {
        return Err(Error::DimensionMismatch {
            context: "d⊗d input (d2 vs d1)",
            expected: dims.d1,
            found: dims.d2,
        });
    }
    if ch.dim() != dims.d2 {
        return Err(Error::DimensionMismatch {
            context: "channel dimension vs subsystem B",
            expected: dims.d2,
            found: ch.dim(),
        });
    }
    Ok(dims.d1)
}

fn diagonal_schmidt_weights<T: Real>(psi: &PureState<T>) -> Option<Vec<T>> {
    let c = psi.coefficient_matrix();
    let tol = T::tol(SCHMIDT_FORM_TOL);
    let d = c.rows();
    let mut omega = Vec::with_capacity(d);
    for i in 0..d {
        for j in 0..c.cols() {
            let z = c[(i, j)];
            if i == j {
                if z.im.abs() > tol || z.re < -tol {
                    return None;
                }
                omega.push(z.re.max(T::zero()).powi(2));
            } else if z.norm() > tol {
                return None;
            }
        }
    }
    Some(omega)
}

/// Canonical Schmidt-frame form of a d⊗d pure input and a channel on B.
pub fn schmidt_frame<T: Real>(psi: &PureState<T>, ch: &QuantumChannel<T>) -> Result<SchmidtFrame<T>> {
    let d = require_square_channel(psi.dims(), ch)?;
    if let Some(omega) = diagonal_schmidt_weights(psi) {
        return Ok(SchmidtFrame {
            omega,
            state: psi.clone(),
            channel: ch.clone(),
            rotated: false,
        });
    }
    let s = schmidt(psi)?;
    let omega = s.coefficients.clone();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); d * d];
    for (k, &w) in omega.iter().enumerate() {
        amps[k * d + k] = Complex::new(w.max(T::zero()).sqrt(), T::zero());
    }
    Ok(SchmidtFrame {
        state: PureState::normalized(psi.dims(), amps)?,
        channel: ch.precompose(&s.basis_b)?,
        omega,
        rotated: true,
    })
}

/// min ω_pω_r over pairs with ω_pω_r ≠ 0; `None` for product states.
pub fn eta<T: Real>(omega: &[T]) -> Option<T> {
    let mut best: Option<T> = None;
    for p in 0..omega.len() {
        for r in p + 1..omega.len() {
            let w = omega[p] * omega[r];
            if w > T::tol(ETA_PAIR_TOL) {
                best = Some(best.map_or(w, |b: T| b.min(w)));
            }
        }
    }
    best
}

fn four_sum_pairs<T: Real>(omega: &[T]) -> T {
    let mut s = T::zero();
    for p in 0..omega.len() {
        for r in p + 1..omega.len() {
            s = s + omega[p] * omega[r];
        }
    }
    T::lit(4.0) * s
}

/// Upper and lower factorization bounds of τ for a pure input.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport<T> {
    pub tau_out: T,
    pub upper_bound: T,
    pub lower_bound: T,
    pub eta: T,
    pub choi_tau: T,
    pub input_concurrence_sq: T,
    /// Whether a lower bound applies (at least two nonzero Schmidt weights).
    pub lower_applicable: bool,
    /// Whether the input had to be rotated into its Schmidt frame.
    pub rotated: bool,
}

impl<T: Real> BoundReport<T> {
    pub fn holds(&self, slack: T) -> bool {
        self.tau_out <= self.upper_bound + slack && (!self.lower_applicable || self.lower_bound <= self.tau_out + slack)
    }

    /// Largest amount by which either bound is exceeded (≤ 0 when both hold).
    pub fn excess(&self) -> T {
        let up = self.tau_out - self.upper_bound;
        if self.lower_applicable {
            up.max(self.lower_bound - self.tau_out)
        } else {
            up
        }
    }
}

/// τ of the output, the upper bound (d²/4)·τ(ρ_E)·C²(ψ) and the lower bound
/// (2dη/(d−1))·(d²/4)·τ(ρ_E)·C²(ψ) for a trace-preserving channel on B.
pub fn check_pure_bounds<T: Real>(psi: &PureState<T>, ch: &QuantumChannel<T>) -> Result<BoundReport<T>> {
    let frame = schmidt_frame(psi, ch)?;
    let d = psi.dims().d1;
    let df = T::from_usize(d).unwrap();
    let out = apply_one_sided(&frame.channel, &frame.state.density())?;
    let tau_out = tau(&out)?.total;
    let choi_tau = tau(&choi(&frame.channel)?.state)?.total;
    let c2 = four_sum_pairs(&frame.omega);
    let upper = df * df / T::lit(4.0) * choi_tau * c2;
    let eta_value = eta(&frame.omega);
    let lower = eta_value.map_or(T::zero(), |e| T::lit(2.0) * df * e / (df - T::one()) * upper);
    Ok(BoundReport {
        tau_out,
        upper_bound: upper,
        lower_bound: lower,
        eta: eta_value.unwrap_or_else(T::zero),
        choi_tau,
        input_concurrence_sq: c2,
        lower_applicable: eta_value.is_some(),
        rotated: frame.rotated,
    })
}

/// Largest |C²_{pr,p′r′}(out) − d²ω_pω_r·C²_{pr,p′r′}(ρ_E)| over all
/// components, evaluated in the Schmidt frame of the input.
pub fn component_evolution_check<T: Real>(psi: &PureState<T>, ch: &QuantumChannel<T>) -> Result<T> {
    Ok(component_evolution_detail(psi, ch)?
        .into_iter()
        .map(|(_, lhs, rhs)| (lhs - rhs).abs())
        .fold(T::zero(), T::max))
}

/// Per-component (index, C²(out), d²ω_pω_r·C²(ρ_E)).
pub fn component_evolution_detail<T: Real>(
    psi: &PureState<T>,
    ch: &QuantumChannel<T>,
) -> Result<Vec<(ComponentIndex, T, T)>> {
    let frame = schmidt_frame(psi, ch)?;
    let dims = psi.dims();
    let df = T::from_usize(dims.d1).unwrap();
    let out = apply_one_sided(&frame.channel, &frame.state.density())?;
    let rho_e = choi(&frame.channel)?.state;
    component_indices(dims)
        .into_iter()
        .map(|idx| {
            let lhs = component_concurrence(&out, idx)?.powi(2);
            let ce = component_concurrence(&rho_e, idx)?;
            let rhs = df * df * frame.omega[idx.p] * frame.omega[idx.r] * ce * ce;
            Ok((idx, lhs, rhs))
        })
        .collect()
}

/// A tangle value that is either known exactly or only estimated from above.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tangle<T> {
    Exact(T),
    Estimate(T),
}

impl<T: Copy> Tangle<T> {
    pub fn value(&self) -> T {
        match *self {
            Tangle::Exact(v) | Tangle::Estimate(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Tangle::Exact(_))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MixedBoundReport<T> {
    pub tau_out: T,
    pub bound: T,
    pub choi_tau: T,
    pub holds: bool,
}

/// τ((1⊗E)ρ₀) against (d²/4)·τ(ρ_E)·τ′(ρ₀). With an exact tangle a violation
/// beyond [`BOUND_SLACK`] is an error; with an estimate it is only reported.
pub fn check_mixed_bound<T: Real>(
    rho0: &DensityMatrix<T>,
    ch: &QuantumChannel<T>,
    tangle0: Tangle<T>,
) -> Result<MixedBoundReport<T>> {
    let d = require_square_channel(rho0.dims(), ch)?;
    let df = T::from_usize(d).unwrap();
    let tau_out = tau(&apply_one_sided(ch, rho0)?)?.total;
    let choi_tau = tau(&choi(ch)?.state)?.total;
    let bound = df * df / T::lit(4.0) * choi_tau * tangle0.value();
    let holds = tau_out <= bound + T::tol(BOUND_SLACK);
    if !holds && tangle0.is_exact() {
        return Err(Error::BoundViolation {
            context: "mixed-state tau bound",
            lhs: tau_out.to_f64_lossy(),
            rhs: bound.to_f64_lossy(),
        });
    }
    Ok(MixedBoundReport {
        tau_out,
        bound,
        choi_tau,
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TangleDynamicsReport<T> {
    pub tangle_out: T,
    pub bound: T,
    /// True when every tangle entering the comparison is exact.
    pub exact: bool,
    /// `tangle_out ≤ bound` up to [`BOUND_SLACK`]; only a soft verdict unless `exact`.
    pub within: bool,
}

/// The tangle of ρ when it is computable (two qubits, where it equals τ; pure
/// states, where it is C²), otherwise a Monte Carlo upper estimate.
pub fn tangle_of<T: Real>(rho: &DensityMatrix<T>, trials: usize, seed: u64) -> Result<Tangle<T>> {
    let dims = rho.dims();
    if dims.d1 == 2 && dims.d2 == 2 {
        return Ok(Tangle::Exact(tau(rho)?.total));
    }
    let spec = rho.spectrum(false)?;
    let rank = spec.eigenvalues.iter().filter(|&&mu| mu > T::tol(RANK_TOL)).count();
    let value = tangle_upper_estimate(rho, trials, seed)?;
    Ok(if rank == 1 {
        Tangle::Exact(value)
    } else {
        Tangle::Estimate(value)
    })
}

/// Tangle of the output against (d²/4)·τ′(ρ_E)·τ′(ρ₀), each tangle exact when
/// computable and estimated by Monte Carlo otherwise.
pub fn tangle_dynamics_check<T: Real>(
    rho0: &DensityMatrix<T>,
    ch: &QuantumChannel<T>,
    trials: usize,
    seed: u64,
) -> Result<TangleDynamicsReport<T>> {
    require_square_channel(rho0.dims(), ch)?;
    let input = tangle_of(rho0, trials, seed)?;
    let choi_tangle = tangle_of(&choi(ch)?.state, trials, seed.wrapping_add(1))?;
    tangle_dynamics_check_with(rho0, ch, trials, seed, input, choi_tangle)
}

/// As [`tangle_dynamics_check`] with caller-supplied input and Choi tangles
/// (e.g. analytic values for isotropic Choi states).
pub fn tangle_dynamics_check_with<T: Real>(
    rho0: &DensityMatrix<T>,
    ch: &QuantumChannel<T>,
    trials: usize,
    seed: u64,
    input_tangle: Tangle<T>,
    choi_tangle: Tangle<T>,
) -> Result<TangleDynamicsReport<T>> {
    let d = require_square_channel(rho0.dims(), ch)?;
    let df = T::from_usize(d).unwrap();
    let out = tangle_of(&apply_one_sided(ch, rho0)?, trials, seed.wrapping_add(2))?;
    let bound = df * df / T::lit(4.0) * choi_tangle.value() * input_tangle.value();
    Ok(TangleDynamicsReport {
        tangle_out: out.value(),
        bound,
        exact: out.is_exact() && input_tangle.is_exact() && choi_tangle.is_exact(),
        within: out.value() <= bound + T::tol(BOUND_SLACK),
    })
}

/// Built-in channel families with closed-form τ decay.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelFamily {
    Depolarizing,
    PhaseDamping,
}

impl ChannelFamily {
    pub fn channel<T: Real>(self, dim: usize, eps: T) -> Result<QuantumChannel<T>> {
        match self {
            ChannelFamily::Depolarizing => QuantumChannel::depolarizing(dim, eps),
            ChannelFamily::PhaseDamping => QuantumChannel::phase_damping(dim, eps),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChannelFamily::Depolarizing => "depolarizing",
            ChannelFamily::PhaseDamping => "phase_damping",
        }
    }
}

impl fmt::Display for ChannelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "depolarizing" | "depolarising" => Ok(ChannelFamily::Depolarizing),
            "phase_damping" | "dephasing" => Ok(ChannelFamily::PhaseDamping),
            other => Err(Error::param(format!("unknown channel family '{other}'"))),
        }
    }
}

fn check_eps<T: Real>(eps: T) -> Result<()> {
    if eps >= T::zero() && eps <= T::one() {
        Ok(())
    } else {
        Err(Error::param(format!("eps {eps} outside [0, 1]")))
    }
}

/// τ of (1⊗E)|ψ⟩⟨ψ| from the Schmidt weights alone:
/// depolarizing Σ_{i<j} max{0, (2d−(2d+2)ε)/d·√(ω_iω_j)}²,
/// phase damping Σ_{i<j} max{0, 2(1−ε)√(ω_iω_j)}².
pub fn closed_form_tau<T: Real>(family: ChannelFamily, omega: &[T], eps: T) -> Result<T> {
    check_eps(eps)?;
    let d = T::from_usize(omega.len()).unwrap();
    let two = T::lit(2.0);
    let factor = match family {
        ChannelFamily::Depolarizing => (two * d - (two * d + two) * eps) / d,
        ChannelFamily::PhaseDamping => two * (T::one() - eps),
    };
    let factor = factor.max(T::zero());
    let mut total = T::zero();
    for i in 0..omega.len() {
        for j in i + 1..omega.len() {
            total = total + factor * factor * omega[i] * omega[j];
        }
    }
    Ok(total)
}

/// τ of the isotropic state ρ_F after depolarizing noise ε on B:
/// 2d/(d−1)·(max{0, F − 1/d − (Fd²−1)ε/d²})².
pub fn isotropic_closed_form<T: Real>(d: usize, fidelity: T, eps: T) -> Result<T> {
    check_eps(eps)?;
    if d < 2 || !(fidelity >= T::zero() && fidelity <= T::one()) {
        return Err(Error::param(format!("isotropic parameters d={d}, F={fidelity}")));
    }
    let df = T::from_usize(d).unwrap();
    let d2 = df * df;
    let x = (fidelity - T::one() / df - (fidelity * d2 - T::one()) * eps / d2).max(T::zero());
    Ok(T::lit(2.0) * df / (df - T::one()) * x * x)
}

/// Settings with an analytic statement about sudden death of τ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeathFamily {
    DepolarizingPure,
    DepolarizingIsotropic,
    PhaseDampingPure,
}

impl FromStr for DeathFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "depolarizing_pure" => Ok(DeathFamily::DepolarizingPure),
            "depolarizing_isotropic" => Ok(DeathFamily::DepolarizingIsotropic),
            "phase_damping_pure" => Ok(DeathFamily::PhaseDampingPure),
            other => Err(Error::param(format!("unknown threshold family '{other}'"))),
        }
    }
}

/// ε at which τ first vanishes: d/(d+1) for entangled pure states under
/// depolarizing noise, (Fd²−d)/(Fd²−1) for isotropic states, and `None` under
/// phase damping (τ reaches zero only at ε = 1).
pub fn sudden_death_threshold<T: Real>(family: DeathFamily, d: usize, fidelity: Option<T>) -> Result<Option<T>> {
    if d < 2 {
        return Err(Error::param(format!("dimension {d} < 2")));
    }
    let df = T::from_usize(d).unwrap();
    match family {
        DeathFamily::DepolarizingPure => Ok(Some(df / (df + T::one()))),
        DeathFamily::PhaseDampingPure => Ok(None),
        DeathFamily::DepolarizingIsotropic => {
            let f = fidelity.ok_or_else(|| Error::param("isotropic threshold needs a fidelity"))?;
            if !(f >= T::zero() && f <= T::one()) {
                return Err(Error::param(format!("fidelity {f} outside [0, 1]")));
            }
            if f <= T::one() / df {
                return Err(Error::NoEntanglement {
                    d,
                    fidelity: f.to_f64_lossy(),
                });
            }
            let fd2 = f * df * df;
            Ok(Some((fd2 - df) / (fd2 - T::one())))
        }
    }
}

/// Closed-form τ(ε) of the reference curve for a [`DeathFamily`]: the
/// maximally entangled input for pure families, ρ_F for the isotropic one.
pub fn death_family_curve<T: Real>(family: DeathFamily, d: usize, fidelity: Option<T>, eps: T) -> Result<T> {
    let uniform = vec![T::one() / T::from_usize(d).unwrap(); d];
    match family {
        DeathFamily::DepolarizingPure => closed_form_tau(ChannelFamily::Depolarizing, &uniform, eps),
        DeathFamily::PhaseDampingPure => closed_form_tau(ChannelFamily::PhaseDamping, &uniform, eps),
        DeathFamily::DepolarizingIsotropic => {
            let f = fidelity.ok_or_else(|| Error::param("isotropic curve needs a fidelity"))?;
            isotropic_closed_form(d, f, eps)
        }
    }
}

/// Smallest ε in [0, 1] with f(ε) ≤ `dead_below`, located by bisection to
/// `tol`, assuming f is nonincreasing. `None` if f is still alive at ε = 1.
///
/// Closed forms clip to an exact zero, so `dead_below = 0` locates their
/// threshold precisely; near a quadratic zero a positive cutoff such as
/// [`DEATH_TOL`] fires early by about its square root.
pub fn bisect_death<T: Real>(f: impl Fn(T) -> Result<T>, dead_below: T, tol: T) -> Result<Option<T>> {
    let dead = |v: T| v <= dead_below;
    if dead(f(T::zero())?) {
        return Ok(Some(T::zero()));
    }
    if !dead(f(T::one())?) {
        return Ok(None);
    }
    let (mut lo, mut hi) = (T::zero(), T::one());
    while hi - lo > tol {
        let mid = (lo + hi) / T::lit(2.0);
        if dead(f(mid)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Evenly spaced ε values `start..=stop` with `points ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpsGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Default for EpsGrid {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 1.0,
            points: 101,
        }
    }
}

impl EpsGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        let g = Self { start, stop, points };
        g.validate()?;
        Ok(g)
    }

    /// A single-point grid.
    pub fn single(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::param(format!("eps {eps} outside [0, 1]")));
        }
        Ok(Self {
            start: eps,
            stop: eps,
            points: 1,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        if !in_unit(self.start) || !in_unit(self.stop) {
            return Err(Error::param(format!("grid {}:{} leaves [0, 1]", self.start, self.stop)));
        }
        match self.points {
            0 => Err(Error::param("grid is empty")),
            1 if self.start == self.stop => Ok(()),
            1 => Err(Error::param("a one-point grid needs start == stop")),
            _ if self.start < self.stop => Ok(()),
            _ => Err(Error::param("grid must be strictly increasing")),
        }
    }

    pub fn values<T: Real>(&self) -> Vec<T> {
        if self.points == 1 {
            return vec![T::lit(self.start)];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    T::lit(self.stop)
                } else {
                    T::lit(self.start + step * k as f64)
                }
            })
            .collect()
    }
}

impl FromStr for EpsGrid {
    type Err = Error;

    /// `start:stop:points`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::param(format!("grid '{s}' is not start:stop:points")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::param(format!("bad grid bound '{p}'")))
        };
        let points = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::param(format!("bad grid size '{}'", parts[2])))?;
        EpsGrid::new(num(parts[0])?, num(parts[1])?, points)
    }
}

/// What gets swept.
#[derive(Clone, Debug)]
pub enum SweepInput<T> {
    Pure(PureState<T>),
    Isotropic {
        d: usize,
        fidelity: T,
    },
    /// A mixed input with a tangle value (exact or estimated) for the upper bound.
    Mixed {
        state: DensityMatrix<T>,
        tangle: T,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub eps: T,
    pub tau: T,
    pub upper: Option<T>,
    pub lower: Option<T>,
    pub closed_form: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult<T> {
    pub parameter: String,
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Real> SweepResult<T> {
    pub const CSV_HEADER: &'static str = "eps,tau,upper,lower,closed_form";

    pub fn to_csv(&self) -> String {
        let cell = |v: Option<T>| v.map(|x| format!("{:.16e}", x)).unwrap_or_default();
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{},{},{}\n",
                r.eps,
                r.tau,
                cell(r.upper),
                cell(r.lower),
                cell(r.closed_form)
            ));
        }
        out
    }

    /// First grid point with τ below [`DEATH_TOL`].
    pub fn first_death(&self) -> Option<T> {
        self.rows.iter().find(|r| r.tau < T::tol(DEATH_TOL)).map(|r| r.eps)
    }

    /// Largest |τ − closed form| over rows that have a closed form.
    pub fn max_closed_form_deviation(&self) -> T {
        self.rows
            .iter()
            .filter_map(|r| r.closed_form.map(|c| (r.tau - c).abs()))
            .fold(T::zero(), T::max)
    }
}

fn sweep_point<T: Real>(input: &SweepInput<T>, family: ChannelFamily, eps: T) -> Result<SweepRow<T>> {
    match input {
        SweepInput::Pure(psi) => {
            let ch = family.channel(psi.dims().d2, eps)?;
            let report = check_pure_bounds(psi, &ch)?;
            let omega = schmidt_frame(psi, &ch)?.omega;
            Ok(SweepRow {
                eps,
                tau: report.tau_out,
                upper: Some(report.upper_bound),
                lower: Some(report.lower_bound),
                closed_form: Some(closed_form_tau(family, &omega, eps)?),
            })
        }
        SweepInput::Isotropic { d, fidelity } => {
            let rho = isotropic(*d, *fidelity)?;
            let ch = family.channel(*d, eps)?;
            let report = check_mixed_bound(&rho, &ch, Tangle::Exact(isotropic_tangle(*d, *fidelity)?))?;
            let closed_form = match family {
                ChannelFamily::Depolarizing => Some(isotropic_closed_form(*d, *fidelity, eps)?),
                ChannelFamily::PhaseDamping => None,
            };
            Ok(SweepRow {
                eps,
                tau: report.tau_out,
                upper: Some(report.bound),
                lower: None,
                closed_form,
            })
        }
        SweepInput::Mixed { state, tangle } => {
            let ch = family.channel(state.dims().d2, eps)?;
            let report = check_mixed_bound(state, &ch, Tangle::Estimate(*tangle))?;
            Ok(SweepRow {
                eps,
                tau: report.tau_out,
                upper: Some(report.bound),
                lower: None,
                closed_form: None,
            })
        }
    }
}

/// τ, its bounds and the closed form at every grid point, computed in
/// parallel and returned in grid order.
pub fn sweep<T: Real>(input: &SweepInput<T>, family: ChannelFamily, grid: &EpsGrid) -> Result<SweepResult<T>> {
    grid.validate()?;
    let rows = grid
        .values::<T>()
        .into_par_iter()
        .map(|eps| sweep_point(input, family, eps))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        parameter: "eps".into(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{isotropic_tau, pure_concurrence_sq};
    use crate::rng::seeded;
    use crate::states::{haar_random_pure_with, max_entangled};

    fn skewed_state() -> PureState<f64> {
        PureState::from_schmidt(&[1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0]).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let omega: [f64; 3] = [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0];
        for fam in [ChannelFamily::Depolarizing, ChannelFamily::PhaseDamping] {
            assert!((closed_form_tau(fam, &omega, 0.0).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!((closed_form_tau(ChannelFamily::Depolarizing, &omega, 0.3).unwrap() - 0.36).abs() < 1e-14);
        assert!((closed_form_tau(ChannelFamily::PhaseDamping, &omega, 0.5).unwrap() - 0.25).abs() < 1e-14);
        assert!(closed_form_tau(ChannelFamily::PhaseDamping, &omega, 1.5).is_err());
        assert!("amplitude".parse::<ChannelFamily>().is_err());
    }

    #[test]
    fn pure_bounds_example() {
        let psi = PureState::<f64>::from_schmidt(&[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]).unwrap();
        let ch = QuantumChannel::depolarizing(3, 0.3).unwrap();
        let r = check_pure_bounds(&psi, &ch).unwrap();
        assert!(!r.rotated);
        assert!((r.tau_out - 0.36).abs() < 1e-9);
        assert!(r.holds(1e-8));
        assert!((r.eta - 1.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_entangled_input_saturates_lower_bound() {
        let psi = max_entangled::<f64>(3).unwrap();
        let mut rng = seeded(5);
        let ch = QuantumChannel::random(3, 3, &mut rng).unwrap();
        let r = check_pure_bounds(&psi, &ch).unwrap();
        assert!((r.eta - 1.0 / 9.0).abs() < 1e-15);
        assert!((r.tau_out - r.choi_tau).abs() < 1e-9);
        assert!((r.lower_bound - r.tau_out).abs() < 1e-9);
        assert!(r.holds(1e-8));
    }

    #[test]
    fn product_input_has_no_lower_bound() {
        let psi = PureState::<f64>::basis(BipartiteDims::square(3).unwrap(), 0, 0).unwrap();
        let ch = QuantumChannel::depolarizing(3, 0.1).unwrap();
        let r = check_pure_bounds(&psi, &ch).unwrap();
        assert!(!r.lower_applicable);
        assert_eq!(r.lower_bound, 0.0);
        assert_eq!(r.tau_out, 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let psi = skewed_state();
        let ch = QuantumChannel::<f64>::depolarizing(2, 0.1).unwrap();
        assert!(matches!(
            check_pure_bounds(&psi, &ch),
            Err(Error::DimensionMismatch { .. })
        ));
        let rect = PureState::<f64>::basis(BipartiteDims::new(2, 3).unwrap(), 0, 0).unwrap();
        let ch3 = QuantumChannel::<f64>::depolarizing(3, 0.1).unwrap();
        assert!(check_pure_bounds(&rect, &ch3).is_err());
    }

    #[test]
    fn component_law_for_builtins() {
        let psi = PureState::<f64>::from_schmidt(&[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]).unwrap();
        let id = QuantumChannel::identity(3).unwrap();
        assert!(component_evolution_check(&psi, &id).unwrap() <= 1e-9);
        let dep = QuantumChannel::depolarizing(3, 0.3).unwrap();
        assert!(component_evolution_check(&psi, &dep).unwrap() <= 1e-8);
        let pd = QuantumChannel::phase_damping(3, 0.5).unwrap();
        assert!(component_evolution_check(&psi, &pd).unwrap() <= 1e-8);
    }

    #[test]
    fn component_law_for_random_inputs() {
        let mut rng = seeded(77);
        let dims = BipartiteDims::square(3).unwrap();
        for _ in 0..20 {
            let psi = haar_random_pure_with::<f64, _>(dims, &mut rng);
            let ch = QuantumChannel::random(3, 2, &mut rng).unwrap();
            assert!(component_evolution_check(&psi, &ch).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn schmidt_frame_preserves_output_up_to_local_unitary_on_a() {
        let mut rng = seeded(12);
        let dims = BipartiteDims::square(3).unwrap();
        let psi = haar_random_pure_with::<f64, _>(dims, &mut rng);
        let ch = QuantumChannel::random(3, 2, &mut rng).unwrap();
        let frame = schmidt_frame(&psi, &ch).unwrap();
        assert!(frame.rotated);
        let direct = apply_one_sided(&ch, &psi.density()).unwrap();
        let canon = apply_one_sided(&frame.channel, &frame.state.density()).unwrap();
        // same spectrum and same B marginal
        let a = direct.spectrum(false).unwrap().eigenvalues;
        let b = canon.spectrum(false).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!(direct.partial_trace_a().max_abs_diff(&canon.partial_trace_a()) < 1e-10);
    }

    #[test]
    fn mixed_bound_examples() {
        let rho = isotropic::<f64>(3, 8.0 / 9.0).unwrap();
        let ch = QuantumChannel::depolarizing(3, 0.2).unwrap();
        let r = check_mixed_bound(&rho, &ch, Tangle::Exact(isotropic_tangle(3, 8.0 / 9.0).unwrap())).unwrap();
        assert!((r.tau_out - 0.48).abs() < 1e-9);
        assert!(r.holds);

        let psi = skewed_state();
        let pure = check_mixed_bound(&psi.density(), &ch, Tangle::Exact(pure_concurrence_sq(&psi))).unwrap();
        let rep = check_pure_bounds(&psi, &ch).unwrap();
        assert!((pure.bound - rep.upper_bound).abs() < 1e-9);
        assert!((pure.tau_out - rep.tau_out).abs() < 1e-9);
    }

    #[test]
    fn exact_violation_is_an_error() {
        let rho = isotropic::<f64>(3, 1.0).unwrap();
        let ch = QuantumChannel::identity(3).unwrap();
        let err = check_mixed_bound(&rho, &ch, Tangle::Exact(0.1)).unwrap_err();
        assert!(matches!(err, Error::BoundViolation { .. }));
        let soft = check_mixed_bound(&rho, &ch, Tangle::Estimate(0.1)).unwrap();
        assert!(!soft.holds);
    }

    #[test]
    fn tangle_dynamics_on_two_qubit_pure_input() {
        let mut rng = seeded(3);
        let dims = BipartiteDims::square(2).unwrap();
        let psi = haar_random_pure_with::<f64, _>(dims, &mut rng);
        let ch = QuantumChannel::random(2, 2, &mut rng).unwrap();
        let r = tangle_dynamics_check(&psi.density(), &ch, 200, 9).unwrap();
        assert!(r.exact);
        assert!(r.within, "{r:?}");
        // two-qubit outputs saturate the bound
        assert!((r.tangle_out - r.bound).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn thresholds() {
        assert_eq!(
            sudden_death_threshold::<f64>(DeathFamily::DepolarizingPure, 3, None).unwrap(),
            Some(0.75)
        );
        let iso = sudden_death_threshold(DeathFamily::DepolarizingIsotropic, 3, Some(8.0f64 / 9.0))
            .unwrap()
            .unwrap();
        assert!((iso - 5.0 / 7.0).abs() < 1e-15);
        assert_eq!(
            sudden_death_threshold::<f64>(DeathFamily::PhaseDampingPure, 4, None).unwrap(),
            None
        );
        assert!(matches!(
            sudden_death_threshold(DeathFamily::DepolarizingIsotropic, 3, Some(0.3)),
            Err(Error::NoEntanglement { .. })
        ));
    }

    #[test]
    fn bisection_matches_thresholds() {
        let root = bisect_death(
            |e: f64| death_family_curve(DeathFamily::DepolarizingPure, 3, None, e),
            0.0,
            1e-9,
        )
        .unwrap()
        .unwrap();
        assert!((root - 0.75).abs() < 1e-8);
        let root = bisect_death(
            |e: f64| death_family_curve(DeathFamily::DepolarizingIsotropic, 3, Some(8.0 / 9.0), e),
            0.0,
            1e-9,
        )
        .unwrap()
        .unwrap();
        assert!((root - 5.0 / 7.0).abs() < 1e-8);
        let root = bisect_death(
            |e: f64| death_family_curve(DeathFamily::PhaseDampingPure, 3, None, e),
            0.0,
            1e-9,
        )
        .unwrap()
        .unwrap();
        assert!((root - 1.0).abs() < 1e-8);
    }

    #[test]
    fn grid_parsing_and_values() {
        let g: EpsGrid = "0:1:101".parse().unwrap();
        let v = g.values::<f64>();
        assert_eq!(v.len(), 101);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[100], 1.0);
        assert!((v[75] - 0.75).abs() < 1e-15);
        assert!("0:1".parse::<EpsGrid>().is_err());
        assert!("0:2:5".parse::<EpsGrid>().is_err());
        assert!("0.5:0.1:5".parse::<EpsGrid>().is_err());
        assert!("0:1:0".parse::<EpsGrid>().is_err());
        assert_eq!(EpsGrid::single(0.0).unwrap().values::<f64>(), vec![0.0]);
    }

    #[test]
    fn skewed_state_sweeps() {
        let grid = EpsGrid::default();
        let dep = sweep(&SweepInput::Pure(skewed_state()), ChannelFamily::Depolarizing, &grid).unwrap();
        assert!((dep.rows[0].tau - 1.0).abs() < 1e-9);
        assert!(dep.max_closed_form_deviation() <= 1e-8);
        assert!((dep.first_death().unwrap() - 0.75).abs() < 1e-12);
        for w in dep.rows.windows(2) {
            assert!(w[1].tau <= w[0].tau + 1e-12);
        }
        let pd = sweep(&SweepInput::Pure(skewed_state()), ChannelFamily::PhaseDamping, &grid).unwrap();
        for r in &pd.rows {
            assert!((r.tau - (1.0 - r.eps).powi(2)).abs() < 1e-8);
        }
        let iso = sweep(
            &SweepInput::Isotropic {
                d: 3,
                fidelity: 8.0 / 9.0,
            },
            ChannelFamily::Depolarizing,
            &grid,
        )
        .unwrap();
        assert!((iso.rows[0].tau - isotropic_tau(3, 8.0f64 / 9.0).unwrap()).abs() < 1e-9);
        assert!(iso.max_closed_form_deviation() <= 1e-8);
        assert!(iso.rows.iter().all(|r| r.lower.is_none()));
    }

    #[test]
    fn csv_layout() {
        let grid = EpsGrid::new(0.0, 1.0, 3).unwrap();
        let rho = isotropic::<f64>(3, 0.5).unwrap();
        let s = sweep(
            &SweepInput::Mixed {
                state: rho,
                tangle: 0.2,
            },
            ChannelFamily::PhaseDamping,
            &grid,
        )
        .unwrap();
        let csv = s.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "eps,tau,upper,lower,closed_form");
        assert_eq!(lines.len(), 4);
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells.len(), 5);
        assert_eq!(cells[3], "");
        assert_eq!(cells[4], "");
        assert_eq!(cells[0], "0.0000000000000000e0");
    }
}
