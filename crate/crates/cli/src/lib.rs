//! Command-line front end: figure reproduction, closed-form tables,
//! Monte-Carlo summaries and the oracle-agreement validation report.

pub mod analytic_cmd;
pub mod figures;
pub mod settings;
pub mod svg;
pub mod validate;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use settings::{Settings, MAX_ANTENNAS, MAX_TRIALS};

#[derive(Debug, Parser)]
#[command(name = "mimo-zf", version, about = "ZF uplink analysis under pilot contamination")]
pub struct Cli {
    /// Scenario file with `key = value` lines
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed for every Monte-Carlo run
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Monte-Carlo trials per point
    #[arg(long, global = true, default_value_t = 10_000)]
    pub trials: usize,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reproduce one figure as CSV curves plus an SVG overlay
    Figure {
        #[arg(value_enum)]
        id: figures::FigureId,
    },
    /// Evaluate a closed form over a grid, without simulation
    Analytic(analytic_cmd::AnalyticArgs),
    /// Run Monte-Carlo trials for the configured scenario and print a summary
    Montecarlo {
        /// Also simulate the QAM data phase
        #[arg(long)]
        ser: bool,
        /// Observed user (all users when omitted)
        #[arg(long)]
        user: Option<usize>,
    },
    /// Run the oracle-agreement checks; exits nonzero on any failure
    Validate {
        /// Report path (JSON lines); defaults to `<out>/validation.jsonl`
        #[arg(long)]
        report: Option<PathBuf>,
        /// Double θ in the closed-form side of the checks
        #[arg(long, hide = true)]
        corrupt_theta: bool,
    },
}

/// Runs a parsed command. `Ok(false)` means the command ran but reported
/// failures.
pub fn run(cli: Cli) -> anyhow::Result<bool> {
    let settings = Settings::load(cli.config.as_deref(), cli.seed, cli.trials)?;
    match cli.command {
        Command::Figure { id } => {
            let figure = figures::build_figure(id, &settings)?;
            for path in figures::write_figure(&figure, &cli.out)? {
                println!("{}", path.display());
            }
            Ok(true)
        }
        Command::Analytic(args) => {
            let path = analytic_cmd::run(&args, &settings, &cli.out)?;
            println!("{}", path.display());
            Ok(true)
        }
        Command::Montecarlo { ser, user } => {
            let summary = settings::montecarlo_summary(&settings, ser, user)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(true)
        }
        Command::Validate { report, corrupt_theta } => {
            let path = report.unwrap_or_else(|| cli.out.join("validation.jsonl"));
            let records = validate::run_checks(&settings, corrupt_theta)?;
            validate::write_report(&records, &path)?;
            let failed = records.iter().filter(|r| r.status == validate::Status::Fail).count();
            for r in &records {
                eprintln!("{:<5} {}", r.status.as_str(), r.check);
            }
            eprintln!("{} checks, {failed} failed; report at {}", records.len(), path.display());
            Ok(failed == 0)
        }
    }
}
