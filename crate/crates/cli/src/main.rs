use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use interpolse_cli::commands::EXIT_ERROR;
use interpolse_cli::{cmd_compare, cmd_verify, gen_bitsum, gen_shortest_path, RunArgs, VerifyArgs, Weights};

/// Symbolic execution with interpolation-based pruning.
#[derive(Parser)]
#[command(name = "interpolse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether an error is reachable. Exits 0 if unreachable, 1 if
    /// reachable, 2 on timeout and 3 on errors.
    Verify(VerifyArgs),
    /// Run with and without interpolation and report both.
    Compare(RunArgs),
    /// Print a benchmark program.
    #[command(subcommand)]
    Gen(Gen),
}

#[derive(Subcommand)]
enum Gen {
    /// Paths through a weighted DAG with an assertion on their length.
    ShortestPath {
        #[arg(long)]
        n: usize,
        /// `layered-random(SEED)` or edges such as `1-2:20,1-3:35`.
        #[arg(long)]
        matrix: Weights,
        #[arg(long, allow_hyphen_values = true)]
        bound: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sum of `n` values each chosen from {1, -1}.
    Bitsum {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn emit(text: &str, output: Option<PathBuf>) -> i32 {
    match output {
        Some(path) => match std::fs::write(&path, text) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                EXIT_ERROR
            }
        },
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            0
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());
    let code = match cli.command {
        Command::Verify(args) => cmd_verify(&args, &mut out, &mut err),
        Command::Compare(args) => cmd_compare(&args, &mut out, &mut err),
        Command::Gen(Gen::ShortestPath { n, matrix, bound, output }) => match gen_shortest_path(n, &matrix, bound) {
            Ok(text) => emit(&text, output),
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::Gen(Gen::Bitsum { n, output }) => emit(&gen_bitsum(n as usize), output),
    };
    ExitCode::from(code as u8)
}
