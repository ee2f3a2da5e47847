use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tmk_cli::{output, CliError, Grid, Outcome, RunConfig, Suite};

#[derive(Parser)]
#[command(name = "tmk", version, about = "Classify almost Hermitian structures on tangent bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the structure induced by a model and write a JSON report.
    Classify {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Einstein residual of the Weyl family over a grid of lambda values.
    ScanLambda {
        config: PathBuf,
        /// start:stop:step, inclusive.
        #[arg(long, allow_hyphen_values = true)]
        grid: Grid,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle and identity suites.
    Verify {
        config: PathBuf,
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("TMK_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Argument(format!("TMK_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Argument(e.to_string()))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    configure_threads()?;
    let (cfg_path, out) = match &cli.command {
        Command::Classify { config, out } | Command::ScanLambda { config, out, .. } | Command::Verify { config, out, .. } => {
            (config, out)
        }
    };
    let cfg = RunConfig::load(cfg_path)?;
    let outcome: Outcome = match &cli.command {
        Command::Classify { .. } => tmk_cli::classify(&cfg)?,
        Command::ScanLambda { grid, .. } => tmk_cli::scan_lambda(&cfg, grid)?,
        Command::Verify { suite, .. } => tmk_cli::verify(&cfg, *suite)?,
    };
    let path = out.clone().or_else(|| cfg.output.as_ref().map(|o| o.path.clone()));
    output::emit(path.as_deref(), &outcome.bytes)?;
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
