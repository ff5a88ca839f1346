use std::path::Path;

use ctau::bounds::tau;
use ctau::channels::apply_one_sided;
use ctau::dynamics::{
    bisect_death, death_family_curve, sudden_death_threshold, sweep, tangle_of, ChannelFamily, DeathFamily, SweepInput,
};
use ctau::io::{parse_channel, parse_state, tau_breakdown_json, LoadedState};
use ctau::states::{haar_random_pure, isotropic, max_entangled, random_mixed, werner};
use ctau::{BipartiteDims, DensityMatrix, PureState, QuantumChannel};
use serde::Serialize;

use crate::config::{ChannelSpec, RunConfig, StateSpec};
use crate::error::CliError;

/// |analytic − numeric| allowed for a sudden-death threshold.
pub const THRESHOLD_AGREEMENT: f64 = 1e-6;
/// Bisection bracket width.
pub const BISECTION_TOL: f64 = 1e-10;

/// A resolved input state, keeping track of families with exact tangles.
#[derive(Clone, Debug)]
pub enum Input {
    Pure(PureState),
    Isotropic {
        d: usize,
        fidelity: f64,
        state: DensityMatrix,
    },
    Mixed(DensityMatrix),
}

impl Input {
    pub fn density(&self) -> DensityMatrix {
        match self {
            Input::Pure(psi) => psi.density(),
            Input::Isotropic { state, .. } | Input::Mixed(state) => state.clone(),
        }
    }

    pub fn dims(&self) -> BipartiteDims {
        match self {
            Input::Pure(psi) => psi.dims(),
            Input::Isotropic { state, .. } | Input::Mixed(state) => state.dims(),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn build_state(cfg: &RunConfig) -> Result<Input, CliError> {
    let d = cfg.dim();
    let square = || BipartiteDims::square(d);
    Ok(match &cfg.state {
        StateSpec::MaxEntangled => Input::Pure(max_entangled(d)?),
        StateSpec::Product => Input::Pure(PureState::basis(square()?, 0, 0)?),
        StateSpec::Schmidt(w) => {
            if cfg.d.is_some_and(|d| d != w.len()) {
                return Err(CliError::Parse(format!("{} Schmidt weights for d = {d}", w.len())));
            }
            Input::Pure(PureState::from_schmidt(w)?)
        }
        StateSpec::Isotropic(f) => {
            let fidelity = f.or(cfg.fidelity).ok_or_else(|| {
                CliError::Parse("isotropic state needs a fidelity (isotropic:F or --fidelity)".into())
            })?;
            Input::Isotropic {
                d,
                fidelity,
                state: isotropic(d, fidelity)?,
            }
        }
        StateSpec::Werner(mu) => Input::Mixed(werner(d, *mu)?),
        StateSpec::RandomPure => Input::Pure(haar_random_pure(square()?, cfg.seed)),
        StateSpec::RandomMixed(rank) => Input::Mixed(random_mixed(square()?, *rank, cfg.seed)?),
        StateSpec::File(path) => match parse_state(&read(path)?)? {
            LoadedState::Pure(psi) => Input::Pure(psi),
            LoadedState::Mixed(rho) => Input::Mixed(rho),
        },
    })
}

pub fn build_channel(spec: &ChannelSpec, dim: usize, eps: f64) -> Result<QuantumChannel, CliError> {
    Ok(match spec {
        ChannelSpec::Builtin(f) => f.channel(dim, eps)?,
        ChannelSpec::Identity => QuantumChannel::identity(dim)?,
        ChannelSpec::File(path) => {
            let ch = parse_channel(&read(path)?)?;
            if ch.dim() != dim {
                return Err(CliError::Parse(format!(
                    "channel acts on dimension {}, state has d2 = {dim}",
                    ch.dim()
                )));
            }
            ch
        }
    })
}

/// Writes to `--out` or stdout.
pub fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn to_json<S: Serialize>(value: &S) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// τ breakdown of the configured state, after the channel if `--eps` is set.
pub fn tau_json(cfg: &RunConfig) -> Result<String, CliError> {
    let input = build_state(cfg)?;
    let mut rho = input.density();
    if let Some(eps) = cfg.eps {
        let ch = build_channel(&cfg.channel, rho.dims().d2, eps)?;
        rho = apply_one_sided(&ch, &rho)?;
    }
    to_json(&tau_breakdown_json(&tau(&rho)?))
}

pub fn cmd_tau(cfg: &RunConfig) -> Result<(), CliError> {
    emit(cfg, &tau_json(cfg)?)
}

pub fn sweep_csv(cfg: &RunConfig) -> Result<String, CliError> {
    let family = match &cfg.channel {
        ChannelSpec::Builtin(f) => *f,
        other => {
            return Err(CliError::Parse(format!(
                "sweep needs a builtin channel family, got {other:?}"
            )))
        }
    };
    let input = match build_state(cfg)? {
        Input::Pure(psi) => SweepInput::Pure(psi),
        Input::Isotropic { d, fidelity, .. } => SweepInput::Isotropic { d, fidelity },
        Input::Mixed(state) => {
            let tangle = tangle_of(&state, cfg.trials, cfg.seed)?.value();
            SweepInput::Mixed { state, tangle }
        }
    };
    Ok(sweep(&input, family, &cfg.eps_grid)?.to_csv())
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    emit(cfg, &sweep_csv(cfg)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub family: DeathFamily,
    pub d: usize,
    pub fidelity: Option<f64>,
    pub analytic: Option<f64>,
    pub numeric: Option<f64>,
    pub note: String,
}

fn death_family(cfg: &RunConfig) -> DeathFamily {
    if let Some(f) = cfg.family {
        return f;
    }
    match (&cfg.channel, &cfg.state) {
        (ChannelSpec::Builtin(ChannelFamily::PhaseDamping), _) => DeathFamily::PhaseDampingPure,
        (_, StateSpec::Isotropic(_)) => DeathFamily::DepolarizingIsotropic,
        _ => DeathFamily::DepolarizingPure,
    }
}

/// Analytic threshold next to a bisection root of the closed-form curve.
pub fn threshold(cfg: &RunConfig) -> Result<ThresholdReport, CliError> {
    let family = death_family(cfg);
    let d = cfg.dim();
    let fidelity = match family {
        DeathFamily::DepolarizingIsotropic => Some(match &cfg.state {
            StateSpec::Isotropic(Some(f)) => *f,
            _ => cfg
                .fidelity
                .ok_or_else(|| CliError::Parse("isotropic threshold needs --fidelity".into()))?,
        }),
        _ => None,
    };
    let analytic = sudden_death_threshold(family, d, fidelity)?;
    let numeric = bisect_death(|e| death_family_curve(family, d, fidelity, e), 0.0, BISECTION_TOL)?;
    let note = match (analytic, numeric) {
        (Some(a), Some(n)) if (a - n).abs() <= THRESHOLD_AGREEMENT => {
            "sudden death: tau vanishes at a finite eps".into()
        }
        (Some(a), n) => {
            return Err(CliError::Assertion(format!(
                "analytic threshold {a} and bisection root {n:?} disagree by more than {THRESHOLD_AGREEMENT}"
            )))
        }
        (None, Some(n)) if n >= 1.0 - THRESHOLD_AGREEMENT => {
            "no sudden death: tau decays asymptotically and vanishes only at eps = 1".into()
        }
        (None, n) => {
            return Err(CliError::Assertion(format!(
                "no analytic threshold, but the curve vanishes at {n:?}"
            )))
        }
    };
    Ok(ThresholdReport {
        family,
        d,
        fidelity,
        analytic,
        numeric,
        note,
    })
}

pub fn cmd_threshold(cfg: &RunConfig) -> Result<(), CliError> {
    emit(cfg, &to_json(&threshold(cfg)?)?)
}
