//! `nukc`: solve, generate and verify non-uniform k-center instances.
//!
//! Exit codes: 0 solution found (or verification passed), 2 certified
//! infeasible (or verification failed), 3 solver gave up without a
//! certificate, 1 usage or input errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::exit;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use nukc_cli::commands::{cmd_generate, cmd_solve, cmd_verify, Algorithm, Mode};

#[derive(Parser)]
#[command(name = "nukc", version, about = "Non-uniform k-center solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Auto,
    Robust2,
    Contracted,
    Nukc2,
    Nukc3,
    Kcenter,
    RobustKcenter,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Algorithm {
        match a {
            AlgorithmArg::Auto => Algorithm::Auto,
            AlgorithmArg::Robust2 => Algorithm::Robust2,
            AlgorithmArg::Contracted => Algorithm::Contracted,
            AlgorithmArg::Nukc2 => Algorithm::Nukc2,
            AlgorithmArg::Nukc3 => Algorithm::Nukc3,
            AlgorithmArg::Kcenter => Algorithm::Kcenter,
            AlgorithmArg::RobustKcenter => Algorithm::RobustKcenter,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file at a fixed dilation or by binary search.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Auto)]
        algorithm: AlgorithmArg,
        /// Scale all radii by this factor before solving (default 1).
        #[arg(long, conflicts_with = "binary_search")]
        dilation: Option<f64>,
        /// Search for the smallest accepted dilation instead.
        #[arg(long)]
        binary_search: bool,
        /// Cap on round-or-cut iterations per loop.
        #[arg(long)]
        max_iterations: Option<usize>,
    },
    /// Emit a pseudo-random instance file.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        /// Per-class budgets and radii, e.g. "2:10,3:4".
        #[arg(long)]
        classes: String,
        /// Construct around a known dilation-1 solution and record it.
        #[arg(long)]
        planted: bool,
        /// Coverage target (default: cover everything).
        #[arg(long)]
        target: Option<u64>,
    },
    /// Re-check a claimed solution against an instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
    },
}

fn run(command: Command) -> anyhow::Result<(String, i32)> {
    match command {
        Command::Solve {
            file,
            algorithm,
            dilation,
            binary_search,
            max_iterations,
        } => {
            let mode = if binary_search {
                Mode::Search
            } else {
                Mode::Fixed(dilation.unwrap_or(1.0))
            };
            let (report, code) = cmd_solve(&file, algorithm.into(), mode, max_iterations)?;
            Ok((serde_json::to_string_pretty(&report)?, code))
        }
        Command::Generate {
            seed,
            n,
            classes,
            planted,
            target,
        } => {
            let file = cmd_generate(seed, n, &classes, planted, target)?;
            Ok((serde_json::to_string_pretty(&file)?, 0))
        }
        Command::Verify { instance, solution } => {
            let (report, code) = cmd_verify(&instance, &solution)?;
            Ok((serde_json::to_string_pretty(&report)?, code))
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => e.exit(),
            _ => {
                eprint!("{e}");
                exit(1);
            }
        },
    };
    match run(cli.command) {
        Ok((output, code)) => {
            // Tolerate a closed pipe (e.g. piping into head).
            let _ = writeln!(std::io::stdout(), "{output}");
            exit(code);
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            exit(1);
        }
    }
}
