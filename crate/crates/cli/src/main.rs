mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{AuditConfig, Overrides};
use error::CliError;

/// Watermark sensitivity auditing: stamp probe images, score activation
/// dumps, and retrain masked linear heads.
#[derive(Parser, Debug)]
#[command(name = "wmprobe", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// JSON config file.
    #[arg(short, long, value_name = "PATH")]
    config: PathBuf,
    /// Override `output_dir`.
    #[arg(long, value_name = "DIR")]
    output_dir: Option<PathBuf>,
    /// Override the master `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the sensitivity `threshold`.
    #[arg(long)]
    threshold: Option<f64>,
}

impl ConfigArgs {
    fn load(&self) -> Result<AuditConfig, CliError> {
        AuditConfig::load(
            &self.config,
            &Overrides {
                output_dir: self.output_dir.clone(),
                seed: self.seed,
                threshold: self.threshold,
            },
        )
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render the watermark probe datasets.
    Stamp(ConfigArgs),
    /// Check ACTD dumps and their manifests.
    Validate {
        #[arg(required = true)]
        dumps: Vec<PathBuf>,
        /// One JSON object per dump instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Score every representation of the configured dump pairs.
    Score(ConfigArgs),
    /// Rank scored representations by differentiability.
    Rank(ConfigArgs),
    /// Retrain the linear head across masking fractions.
    Sweep(ConfigArgs),
    /// Emit plot-ready JSON from score and sweep outputs.
    Report(ConfigArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Stamp(args) => commands::stamp(&args.load()?).map(|_| ()),
        Command::Validate { dumps, json } => commands::validate(&dumps, json),
        Command::Score(args) => commands::score(&args.load()?),
        Command::Rank(args) => commands::rank(&args.load()?),
        Command::Sweep(args) => commands::sweep(&args.load()?),
        Command::Report(args) => commands::report(&args.load()?).map(|_| ()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = e.report();
            eprintln!("{}", serde_json::to_string(&report).expect("error report serializes"));
            ExitCode::from(report.exit_code as u8)
        }
    }
}
