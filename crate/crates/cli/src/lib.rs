//! Command-line harness: τ breakdowns, ε sweeps, sudden-death thresholds and
//! the verification campaign.

pub mod campaign;
pub mod commands;
pub mod config;
pub mod error;

pub use campaign::{run_campaign, CampaignReport, CheckKind, CheckOutcome};
pub use config::{Cli, CommandKind, RunConfig};
pub use error::{exit, CliError};

/// Runs one parsed invocation.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    match cfg.command {
        CommandKind::Tau => commands::cmd_tau(&cfg),
        CommandKind::Sweep => commands::cmd_sweep(&cfg),
        CommandKind::Verify => campaign::cmd_verify(&cfg),
        CommandKind::Threshold => commands::cmd_threshold(&cfg),
    }
}
