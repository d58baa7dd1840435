use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use macrosim_cli::commands::{self, RunOptions};
use macrosim_cli::CliError;

/// Agent-based macroeconomic simulator.
#[derive(Debug, Parser)]
#[command(name = "macrosim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of household agents.
    #[arg(long)]
    agents: Option<usize>,
    /// Override a configuration value, e.g. --set market.adjustment.kappa=0.1 (repeatable).
    #[arg(long = "set", value_name = "PATH=VALUE")]
    set: Vec<String>,
    /// Output directory (default: a new directory under output.root).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress progress output.
    #[arg(long, short)]
    quiet: bool,
}

impl Common {
    fn into_options(self, manifest: Option<PathBuf>) -> RunOptions {
        RunOptions {
            config: self.config,
            manifest,
            seed: self.seed,
            agents: self.agents,
            set: self.set,
            out: self.out,
            quiet: self.quiet,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation and write its artifacts.
    Run {
        #[command(flatten)]
        common: Common,
        /// Replay the configuration recorded in a manifest.json.
        #[arg(long, conflicts_with = "config")]
        manifest: Option<PathBuf>,
    },
    /// Run the full model and the four ablation variants on one seed.
    Ablate {
        #[command(flatten)]
        common: Common,
    },
    /// Run the same configuration under several decision backends.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Comma-separated backend kinds, e.g. scripted-len,scripted-precautionary.
        #[arg(long, value_delimiter = ',', required = true)]
        backends: Vec<String>,
    },
    /// Recompute report.json and charts from an existing months.csv.
    Report {
        /// Path to months.csv.
        #[arg(long)]
        months: PathBuf,
        /// Directory for report.json (default: next to months.csv).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_charts: bool,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { common, manifest } => commands::cmd_run(&common.into_options(manifest)).map(drop),
        Command::Ablate { common } => commands::cmd_ablate(&common.into_options(None)).map(drop),
        Command::Compare { common, backends } => {
            let kinds = backends.iter().map(|b| commands::parse_backend(b)).collect::<Result<Vec<_>, _>>()?;
            commands::cmd_compare(&common.into_options(None), &kinds).map(drop)
        }
        Command::Report { months, out, no_charts } => {
            let path = commands::cmd_report(&months, out.as_deref(), !no_charts)?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage problems are configuration errors.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
