//! `heatprobe` — boundary-data simulation and cavity reconstruction in one
//! pipeline. See the library crate for the stage semantics; this binary
//! only parses arguments, resolves the output directory, and maps errors
//! to exit codes (2 config, 3 solver, 4 empty reconstruction).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use heatprobe_cli::config;
use heatprobe_cli::stages;
use heatprobe_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "heatprobe",
    version,
    about = "Heat-probe cavity detection pipeline"
)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory (overrides the config's `out_dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for the forward stage.
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    jobs: usize,

    /// Skip forward simulations whose trace files already exist (requires
    /// the output directory to hold this exact config's artifacts).
    #[arg(long, global = true)]
    resume: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate measurement and reference runs; write boundary traces.
    Forward,
    /// Evaluate the indicator sweeps and fits from recorded traces.
    Indicator,
    /// Stationary cross-check of the recorded data (two-path gap, bridge).
    Oracle,
    /// Build the hull / exclusion-ball estimates from the fits.
    Reconstruct,
    /// Run forward, indicator, oracle (if enabled), and reconstruct.
    All,
}

fn run(cli: Cli) -> CliResult<()> {
    let config_path = cli
        .config
        .ok_or_else(|| CliError::Config("--config <FILE> is required".into()))?;
    let loaded = config::load(&config_path)?;
    let out = cli
        .out
        .or_else(|| loaded.config.out_dir.clone())
        .ok_or_else(|| {
            CliError::Config("no output directory: pass --out or set out_dir in the config".into())
        })?;
    match cli.cmd {
        Cmd::Forward => stages::cmd_forward(&loaded, &out, cli.jobs, cli.resume),
        Cmd::Indicator => stages::cmd_indicator(&loaded, &out),
        Cmd::Oracle => stages::cmd_oracle(&loaded, &out),
        Cmd::Reconstruct => stages::cmd_reconstruct(&loaded, &out),
        Cmd::All => stages::cmd_all(&loaded, &out, cli.jobs, cli.resume),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
