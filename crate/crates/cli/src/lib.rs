//! Command-line frontend: verification, mode comparison and benchmark
//! generators.

pub mod commands;
pub mod gen;
pub mod record;

pub use commands::{cmd_compare, cmd_verify, compare, exit_code, replay, CliError, Comparison, RunArgs, VerifyArgs};
pub use gen::{gen_bitsum, gen_shortest_path, InvalidMatrix, Weights};
pub use record::{CompareRecord, ModeName, RunRecord, StatsRecord, StrategyName, VerdictKind};
