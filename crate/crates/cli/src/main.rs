use std::path::PathBuf;
use std::process::ExitCode;

use aerial_d2d_cli::commands::{run_pdf, run_sweep, RunOptions};
use aerial_d2d_cli::eval::evaluate;
use aerial_d2d_cli::CliError;
use clap::{Args, Parser, Subcommand};

/// Nearest-platform distance laws and D2D mode-selection probabilities for
/// aerial networks.
#[derive(Debug, Parser)]
#[command(name = "aerial-d2d", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML configuration file (a previous run's manifest also works).
    #[arg(long)]
    config: PathBuf,

    /// CSV output; the manifest goes to `<out>.manifest.toml`.
    #[arg(long)]
    out: PathBuf,

    /// Base seed. Overrides `mc.seed` and the AERIAL_D2D_SEED variable.
    #[arg(long)]
    seed: Option<u64>,

    /// Monte Carlo worker threads. Overrides `mc.workers`.
    #[arg(long)]
    workers: Option<usize>,
}

impl From<RunArgs> for RunOptions {
    fn from(a: RunArgs) -> Self {
        RunOptions { config: a.config, out: a.out, seed: a.seed, workers: a.workers }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact and approximate nearest-platform distance densities with a
    /// simulated histogram.
    Pdf(RunArgs),

    /// D2D-use probability against platform altitude.
    #[command(name = "pd2d-sweep")]
    Pd2dSweep {
        #[command(flatten)]
        run: RunArgs,

        /// Skip the Monte Carlo columns.
        #[arg(long)]
        analytic_only: bool,
    },

    /// Evaluate one closed-form quantity:
    /// mhcp_density | avg_dth | p_d2d | plos | atg_attenuation.
    Eval {
        expression: String,

        /// Parameters as key=value.
        params: Vec<String>,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Pdf(args) => run_pdf(&args.into()),
        Command::Pd2dSweep { run, analytic_only } => run_sweep(&run.into(), !analytic_only),
        Command::Eval { expression, params } => evaluate(&expression, &params).map(|e| e.render()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
