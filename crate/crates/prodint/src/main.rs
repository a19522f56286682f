use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prodint::{config::ExperimentConfig, CliError};

#[derive(Parser)]
#[command(name = "prodint", version, about = "Runs product-integral experiments from JSON configs")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed (overrides `seed`).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the experiment kinds.
    ListExperiments,
}

fn run(config: PathBuf, out: Option<PathBuf>, seed: Option<u64>) -> Result<u8, CliError> {
    prodint::configure_threads()?;
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let outcome = prodint::run(&cfg, out.as_deref())?;
    let failures = outcome.report.failures();
    for row in &failures {
        eprintln!(
            "FAIL {} [{}]: {:e} {} {:e}",
            row.check,
            row.group,
            row.residual,
            row.relation.symbol(),
            row.tolerance
        );
    }
    println!(
        "{}: {} checks, {} failed; reports in {}",
        cfg.experiment,
        outcome.report.rows.len(),
        failures.len(),
        outcome.dir.display()
    );
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        None | Some(Command::ListExperiments) => {
            print!("{}", prodint::list_experiments());
            ExitCode::SUCCESS
        }
        Some(Command::Run { config, out, seed }) => match run(config, out, seed) {
            Ok(code) => ExitCode::from(code),
            Err(e) => {
                eprintln!("error: {e}");
                e.into_exit()
            }
        },
    }
}
