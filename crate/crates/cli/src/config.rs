//! Command-line flags, the JSON config file and their merge into a
//! [`RunConfig`]. Precedence: built-in defaults < config file < flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use ctau::dynamics::{ChannelFamily, DeathFamily, EpsGrid};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "ctau",
    version,
    about = "Concurrence lower bounds under one-sided quantum channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandKind,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandKind {
    /// Print τ and its component breakdown as JSON.
    Tau,
    /// Write τ, its bounds and the closed form along an ε grid as CSV.
    Sweep,
    /// Run the Monte Carlo verification campaign and print a JSON report.
    Verify,
    /// Compare an analytic sudden-death threshold with a bisection root.
    Threshold,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// JSON config file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Local dimension d (d⊗d systems).
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Channel on B: depolarizing | phase_damping | identity | path to a channel JSON file.
    #[arg(long, global = true)]
    pub channel: Option<String>,
    /// Single noise strength ε.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// ε grid as start:stop:points.
    #[arg(long = "eps-grid", global = true, value_name = "A:B:N")]
    pub eps_grid: Option<String>,
    /// max | product | schmidt:w1,w2,… | isotropic[:F] | werner:μ | random-pure | random-mixed:rank | path.json
    #[arg(long, global = true)]
    pub state: Option<String>,
    /// Isotropic fidelity F (isotropic states and thresholds).
    #[arg(long, global = true)]
    pub fidelity: Option<f64>,
    /// Monte Carlo trials (cases per check in `verify`, estimator budget elsewhere).
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (stdout if absent).
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Threshold family: depolarizing_pure | depolarizing_isotropic | phase_damping_pure.
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Add a deliberately corrupted (non-PSD) input to the campaign.
    #[arg(long = "inject-invalid", global = true)]
    pub inject_invalid: bool,
}

/// The JSON config file: the same keys as the long flags (with underscores).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub d: Option<usize>,
    pub channel: Option<String>,
    pub eps: Option<f64>,
    pub eps_grid: Option<String>,
    pub state: Option<String>,
    pub fidelity: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub family: Option<String>,
    pub inject_invalid: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    MaxEntangled,
    Product,
    Schmidt(Vec<f64>),
    Isotropic(Option<f64>),
    Werner(f64),
    RandomPure,
    RandomMixed(usize),
    File(PathBuf),
}

fn parse_number(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::Parse(format!("not a number: '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            Ok(n / d)
        }
        None => s.parse().map_err(|_| bad()),
    }
}

impl FromStr for StateSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let need = |what: &str| CliError::Parse(format!("state '{s}' needs {what}"));
        match (head.to_ascii_lowercase().as_str(), arg) {
            ("max" | "max-entangled" | "bell", None) => Ok(StateSpec::MaxEntangled),
            ("product", None) => Ok(StateSpec::Product),
            ("schmidt", Some(a)) => Ok(StateSpec::Schmidt(
                a.split(',').map(parse_number).collect::<Result<_, _>>()?,
            )),
            ("schmidt", None) => Err(need("weights, e.g. schmidt:1/6,1/6,2/3")),
            ("isotropic", a) => Ok(StateSpec::Isotropic(a.map(parse_number).transpose()?)),
            ("werner", Some(a)) => Ok(StateSpec::Werner(parse_number(a)?)),
            ("werner", None) => Err(need("a mixing parameter, e.g. werner:0.9")),
            ("random-pure", None) => Ok(StateSpec::RandomPure),
            ("random-mixed", Some(a)) => a
                .trim()
                .parse()
                .map(StateSpec::RandomMixed)
                .map_err(|_| CliError::Parse(format!("bad rank in '{s}'"))),
            ("random-mixed", None) => Err(need("a rank, e.g. random-mixed:2")),
            _ if s.ends_with(".json") || Path::new(s).exists() => Ok(StateSpec::File(PathBuf::from(s))),
            _ => Err(CliError::Parse(format!("unknown state '{s}'"))),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::MaxEntangled => write!(f, "max"),
            StateSpec::Product => write!(f, "product"),
            StateSpec::Schmidt(w) => {
                let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                write!(f, "schmidt:{}", parts.join(","))
            }
            StateSpec::Isotropic(None) => write!(f, "isotropic"),
            StateSpec::Isotropic(Some(x)) => write!(f, "isotropic:{x}"),
            StateSpec::Werner(m) => write!(f, "werner:{m}"),
            StateSpec::RandomPure => write!(f, "random-pure"),
            StateSpec::RandomMixed(r) => write!(f, "random-mixed:{r}"),
            StateSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Builtin(ChannelFamily),
    Identity,
    File(PathBuf),
}

impl FromStr for ChannelSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s.eq_ignore_ascii_case("identity") {
            return Ok(ChannelSpec::Identity);
        }
        if let Ok(f) = s.parse::<ChannelFamily>() {
            return Ok(ChannelSpec::Builtin(f));
        }
        if s.ends_with(".json") || Path::new(s).exists() {
            return Ok(ChannelSpec::File(PathBuf::from(s)));
        }
        Err(CliError::Parse(format!("unknown channel '{s}'")))
    }
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub d: Option<usize>,
    pub channel: ChannelSpec,
    pub eps: Option<f64>,
    pub eps_grid: EpsGrid,
    pub state: StateSpec,
    pub fidelity: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub family: Option<DeathFamily>,
    pub inject_invalid: bool,
}

pub const DEFAULT_D: usize = 3;
pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let file = match &cli.options.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        Self::merge(cli.command, &cli.options, file)
    }

    pub fn merge(command: CommandKind, flags: &Options, file: ConfigFile) -> Result<Self, CliError> {
        let channel = flags.channel.clone().or(file.channel);
        let eps_grid = flags.eps_grid.clone().or(file.eps_grid);
        let state = flags.state.clone().or(file.state);
        let family = flags.family.clone().or(file.family);

        let trials = flags.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(CliError::Parse("trials must be at least 1".into()));
        }
        let eps = flags.eps.or(file.eps);
        if let Some(e) = eps {
            if !(0.0..=1.0).contains(&e) {
                return Err(CliError::Parse(format!("eps {e} outside [0, 1]")));
            }
        }
        // an explicit grid wins; a lone --eps sweeps a single point
        let eps_grid = match (eps_grid, eps) {
            (Some(g), _) => g.parse::<EpsGrid>().map_err(|e| CliError::Parse(e.to_string()))?,
            (None, Some(e)) => EpsGrid::single(e).map_err(|e| CliError::Parse(e.to_string()))?,
            (None, None) => EpsGrid::default(),
        };
        let d = flags.d.or(file.d);
        if let Some(d) = d {
            if d < 2 {
                return Err(CliError::Parse(format!("d = {d} < 2")));
            }
        }
        Ok(RunConfig {
            command,
            d,
            channel: match channel {
                Some(c) => c.parse()?,
                None => ChannelSpec::Builtin(ChannelFamily::Depolarizing),
            },
            eps,
            eps_grid,
            state: match state {
                Some(s) => s.parse()?,
                None => StateSpec::MaxEntangled,
            },
            fidelity: flags.fidelity.or(file.fidelity),
            trials,
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: flags.out.clone().or(file.out),
            family: family
                .map(|f| f.parse::<DeathFamily>().map_err(|e| CliError::Parse(e.to_string())))
                .transpose()?,
            inject_invalid: flags.inject_invalid || file.inject_invalid.unwrap_or(false),
        })
    }

    pub fn dim(&self) -> usize {
        self.d.unwrap_or(DEFAULT_D)
    }
}
