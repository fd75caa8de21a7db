//! `zetafix` — verify simulation-function contractions and run Picard
//! iteration experiments from a single TOML config.
//!
//! Exit codes: 0 success, 1 mathematical failure (with witness), 2
//! configuration or usage error.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use commands::{Failure, Outcome};
use config::TraceFormat;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "zetafix",
    version,
    about = "Simulation-function contraction verifier and Picard iteration lab"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the simulation-function axioms for the configured zeta
    #[command(name = "verify-simfun")]
    VerifySimfun {
        /// Experiment config (TOML)
        #[arg(long)]
        config: PathBuf,
        /// Extra entropy for the randomized sample values added to the
        /// default axiom grid
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the axiom report as JSON to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify metric axioms, closure, distance preservation and the
    /// contraction inequality, stopping at the first failure
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Write all completed reports as JSON to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run Picard iteration from every configured start point
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Trace file stem; files are written as `<out>.<k>.<ext>` plus
        /// `<out>.summary.json` (overrides output.path from the config)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trace format: csv or json (overrides output.format)
        #[arg(long, value_parser = parse_format)]
        format: Option<TraceFormat>,
        /// Skip the instance gate
        #[arg(long)]
        force: bool,
    },
    /// Classify the mapping against the contraction families
    Classify {
        #[arg(long)]
        config: PathBuf,
        /// Write the classification as JSON to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in golden scenario end to end
    #[command(name = "reproduce-example2")]
    ReproduceExample2 {
        /// Grid resolution for the built-in domain
        #[arg(long, default_value_t = 1000)]
        resolution: u32,
        /// Replace the built-in zeta with a custom expression in t, s
        #[arg(long)]
        zeta: Option<String>,
        /// Trace file stem, as for solve
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trace format: csv or json
        #[arg(long, value_parser = parse_format)]
        format: Option<TraceFormat>,
    },
}

fn parse_format(s: &str) -> Result<TraceFormat, String> {
    TraceFormat::parse(s).map_err(|e| e.0)
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::VerifySimfun { config, seed, out } => {
            commands::cmd_verify_simfun(&config, seed, out.as_deref())
        }
        Command::Check { config, out } => commands::cmd_check(&config, out.as_deref()),
        Command::Solve {
            config,
            out,
            format,
            force,
        } => commands::cmd_solve(&config, out.as_deref(), format, force),
        Command::Classify { config, out } => commands::cmd_classify(&config, out.as_deref()),
        Command::ReproduceExample2 {
            resolution,
            zeta,
            out,
            format,
        } => commands::cmd_reproduce_example2(resolution, zeta.as_deref(), out.as_deref(), format),
    }
}

fn main() -> ExitCode {
    // die quietly when the consumer of our stdout goes away (e.g. `| head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::MathFail) => ExitCode::from(1),
        Err(failure) => {
            eprintln!("error: {}", failure);
            ExitCode::from(failure.code())
        }
    }
}
