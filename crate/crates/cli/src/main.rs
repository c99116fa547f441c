//! `pirl`: train, evaluate and inspect advisor-shaped coverage policies.

mod advisor;
mod config;
mod eval;
mod prompt;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{AdvisorKind, MissingConfig, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "pirl", version, about = "Coverage planning with advisor-shaped PPO")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a policy and write checkpoint, log and effective config.
    Train {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Evaluate a checkpoint (or the advisor alone, for llm-only).
    Eval {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Print the advisor prompt for a state given as JSON (`-` for stdin).
    Prompt {
        #[arg(long)]
        state: PathBuf,
    },
    /// Train against recorded advisor responses instead of a live backend.
    Replay {
        #[command(flatten)]
        overrides: Overrides,
    },
}

const EXIT_MISSING_CONFIG: u8 = 2;
const EXIT_INTERRUPTED: u8 = 130;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<MissingConfig>().is_some() {
                ExitCode::from(EXIT_MISSING_CONFIG)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Train { overrides } => train(overrides, None),
        Command::Replay { overrides } => train(overrides, Some(AdvisorKind::Replay)),
        Command::Eval { overrides, checkpoint } => {
            let mut cfg = RunConfig::load(overrides.config.as_deref())?;
            overrides.apply_eval(&mut cfg);
            if overrides.method.is_none() && checkpoint.is_some() {
                // label the run after what the checkpoint holds
                cfg.method = train::load_checkpoint(checkpoint.as_ref().expect("checked"))?.method;
            }
            let outcome = eval::run(cfg, checkpoint.as_ref(), overrides.grid)?;
            println!("{}", pirl_core::eval::EvalReport::CSV_HEADER);
            println!("{}", outcome.report.csv_row());
            eprintln!("wrote {}", outcome.csv.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Prompt { state } => {
            print!("{}", prompt::run(&state)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn train(overrides: Overrides, force_advisor: Option<AdvisorKind>) -> Result<ExitCode> {
    let mut cfg = RunConfig::load(overrides.config.as_deref())?;
    overrides.apply_train(&mut cfg);
    if let Some(kind) = force_advisor {
        cfg.advisor.kind = kind;
    }
    let stop = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&stop);
    // a second signal while shutting down falls through to the default
    let _ = ctrlc::set_handler(move || {
        if flag.swap(true, Ordering::SeqCst) {
            std::process::exit(i32::from(EXIT_INTERRUPTED));
        }
    });
    let outcome = train::run(&cfg, &stop)?;
    eprintln!("trained {} episodes; checkpoint {}", outcome.episodes, outcome.checkpoint.display());
    if outcome.interrupted {
        eprintln!("interrupted; partial checkpoint written");
        return Ok(ExitCode::from(EXIT_INTERRUPTED));
    }
    Ok(ExitCode::SUCCESS)
}
