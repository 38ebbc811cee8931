//! Batch front end for the PMSM sliding-mode controller benchmark.
//!
//! Subcommands: `run` a configured scenario, `compare` all variants across
//! nominal and disturbed conditions, `bench` per-update cost, and
//! `validate` a scenario file without running it. Exit codes distinguish
//! failure classes: 2 configuration, 3 numeric run failure, 4 I/O.

mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::RunOptions;

/// Failure classes mapped onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad scenario file, gains or flags (exit 2).
    Config(String),
    /// A simulation diverged or aborted (exit 3).
    Run(String),
    /// Filesystem failure (exit 4).
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Run(m) | CliError::Io(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "smc-bench",
    version,
    about = "Deterministic PMSM speed-loop benchmark for sliding-mode controller variants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario file (sectioned key = value format).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory; the SMC_BENCH_OUT environment variable overrides it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated controller subset (default: all six).
    #[arg(long)]
    controllers: Option<String>,
    /// Settling band in percent of the reference.
    #[arg(long, default_value_t = 2.0)]
    band: f64,
    /// Force the disturbance observer off regardless of the scenario file.
    #[arg(long)]
    no_eso: bool,
    /// Emit overlay SVG plots (default on; --no-plots disables).
    #[arg(long, overrides_with = "no_plots")]
    plots: bool,
    /// Skip SVG plot output.
    #[arg(long)]
    no_plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured scenario and emit one CSV per controller.
    Run(CommonArgs),
    /// Run nominal and disturbed variants and emit the comparison set.
    Compare(CommonArgs),
    /// Measure per-update controller cost on an identical input tape.
    Bench {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated controller subset (default: all six).
        #[arg(long)]
        controllers: Option<String>,
        /// Update count per controller (split into timing batches).
        #[arg(long, default_value_t = 20_000)]
        bench_updates: usize,
    },
    /// Parse and check a scenario file without running anything.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

/// The environment override applies to the output directory only.
fn resolve_out_dir(flag: Option<PathBuf>) -> Result<PathBuf, CliError> {
    if let Ok(env_dir) = std::env::var("SMC_BENCH_OUT") {
        if !env_dir.is_empty() {
            return Ok(PathBuf::from(env_dir));
        }
    }
    flag.ok_or_else(|| CliError::Config("output directory required: --out or SMC_BENCH_OUT".into()))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let opts = RunOptions {
                scenario_path: &args.scenario,
                out_dir: resolve_out_dir(args.out)?,
                controllers: args.controllers.as_deref(),
                band_pct: args.band,
                no_eso: args.no_eso,
                plots: !args.no_plots,
            };
            commands::cmd_run(&opts)
        }
        Command::Compare(args) => {
            let opts = RunOptions {
                scenario_path: &args.scenario,
                out_dir: resolve_out_dir(args.out)?,
                controllers: args.controllers.as_deref(),
                band_pct: args.band,
                no_eso: args.no_eso,
                plots: !args.no_plots,
            };
            commands::cmd_compare(&opts)
        }
        Command::Bench {
            scenario,
            out,
            controllers,
            bench_updates,
        } => commands::cmd_bench(
            &scenario,
            resolve_out_dir(out)?,
            controllers.as_deref(),
            bench_updates,
        ),
        Command::Validate { scenario } => commands::cmd_validate(&scenario),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
