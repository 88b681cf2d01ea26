use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ids_cli::{pipeline, CliError, Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "ids", version, about = "Conv1D-LSTM intrusion detection on NSL-KDD")]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "ids.toml")]
    config: PathBuf,
    /// Master seed; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run directory; overrides `out` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "IDS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, split, fit the encoder and write encoded splits.
    Preprocess,
    /// Search conv filters, LSTM units and learning rate.
    Tune,
    /// Train the classifier and save a checkpoint.
    Train,
    /// Score the checkpoint on the held-out split.
    Evaluate,
    /// Verify a run directory's checksums and print its results.
    Report {
        /// Run directory; defaults to `--out` or the config's `out`.
        run_dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let overrides = Overrides { seed: cli.seed, out: cli.out.clone() };
    let load = || RunConfig::load(&cli.config, &overrides);
    match cli.command {
        Command::Preprocess => pipeline::cmd_preprocess(&load()?),
        Command::Tune => pipeline::cmd_tune(&load()?),
        Command::Train => pipeline::cmd_train(&load()?),
        Command::Evaluate => pipeline::cmd_evaluate(&load()?).map(|_| ()),
        Command::Report { run_dir } => {
            let dir = match run_dir.or(cli.out) {
                Some(d) => d,
                None => load()?.out,
            };
            pipeline::cmd_report(&dir)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
