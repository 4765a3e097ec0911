//! The `verify` and `compare` subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::Args;
use thiserror::Error;

use interpolse::engine::{self, EngineConfig, ExplorationStats, Verdict, DEFAULT_LOOP_BOUND};
use interpolse::lang::{execute_concrete, parse_program, ConcreteOutcome, LangError, Program};
use interpolse::solver::{eval_formula, Model};

use crate::record::{CompareRecord, ModeName, RunRecord, StrategyName, VerdictKind};

pub const EXIT_UNREACHABLE: i32 = 0;
pub const EXIT_REACHABLE: i32 = 1;
pub const EXIT_TIMEOUT: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}: {1}")]
    Program(PathBuf, LangError),
    #[error("--bound: {0}")]
    Bound(LangError),
    #[error("witness {0} does not replay: {1}")]
    Replay(Model, String),
    #[error("dsei and vanilla disagree: {0:?} vs {1:?}")]
    Disagreement(VerdictKind, VerdictKind),
}

/// Options shared by `verify` and `compare`.
#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Program file.
    pub program: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub strategy: StrategyName,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Back-edge traversals allowed per loop entry.
    #[arg(long, default_value_t = DEFAULT_LOOP_BOUND)]
    pub loop_bound: u32,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    /// Write the run record as JSON to this file.
    #[arg(long)]
    pub stats_out: Option<PathBuf>,
    /// Initial value of the program variable `BOUND`.
    #[arg(long, allow_hyphen_values = true)]
    pub bound: Option<i64>,
    /// Print nothing; report through the exit code only.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t)]
    pub mode: ModeName,
    #[command(flatten)]
    pub run: RunArgs,
}

impl RunArgs {
    pub fn config(&self) -> EngineConfig {
        EngineConfig {
            strategy: self.strategy.into(),
            loop_bound: self.loop_bound,
            timeout: Some(Duration::from_secs_f64(self.timeout.max(0.0))),
            seed: self.seed,
            ..EngineConfig::default()
        }
    }

    pub fn load(&self) -> Result<Program, CliError> {
        let text = std::fs::read_to_string(&self.program).map_err(|e| CliError::Io(self.program.clone(), e))?;
        let p = parse_program(&text).map_err(|e| CliError::Program(self.program.clone(), e))?;
        match self.bound {
            Some(b) => p.with_initial("BOUND", b).map_err(CliError::Bound),
            None => Ok(p),
        }
    }

    fn record(&self, mode: ModeName, verdict: &Verdict, stats: &ExplorationStats) -> RunRecord {
        RunRecord {
            program_path: self.program.display().to_string(),
            mode,
            strategy: self.strategy,
            seed: self.seed,
            loop_bound: self.loop_bound,
            timeout_s: Some(self.timeout),
            verdict: verdict.into(),
            witness: match verdict {
                Verdict::Reachable { model, .. } => {
                    Some(model.iter().map(|(v, x)| (v.name().to_string(), x)).collect())
                }
                _ => None,
            },
            stats: stats.into(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Exit status for a verdict.
pub fn exit_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Unreachable(_) => EXIT_UNREACHABLE,
        Verdict::Reachable { .. } => EXIT_REACHABLE,
        Verdict::Timeout => EXIT_TIMEOUT,
    }
}

/// Runs `program` concretely on `model` and checks that it fails, either at
/// an `error` point or by halting outside the safety formula.
pub fn replay(program: &Program, model: &Model, steps: usize) -> Result<String, CliError> {
    let fail = |why: String| CliError::Replay(model.clone(), why);
    let outcome = execute_concrete(program, model, steps as u64 + 1).map_err(|e| fail(e.to_string()))?;
    match outcome {
        ConcreteOutcome::HitError { point, .. } => Ok(format!("reaches the error at point {point}")),
        ConcreteOutcome::HitHalt { store } => {
            let m: Model = store.into_iter().collect();
            match eval_formula(program.safety(), &m) {
                Ok(false) => Ok(format!("halts in {m}, violating {}", program.safety())),
                Ok(true) => Err(fail("halts in a safe state".into())),
                Err(e) => Err(fail(e.to_string())),
            }
        }
        other => Err(fail(format!("{other:?}"))),
    }
}

fn summary(out: &mut dyn Write, program: &Program, verdict: &Verdict, stats: &ExplorationStats) -> Result<(), CliError> {
    match verdict {
        Verdict::Unreachable(root) => {
            let _ = writeln!(out, "UNREACHABLE");
            if let Some(psi) = root {
                let _ = writeln!(out, "root interpolant: {psi}");
            }
            if stats.is_bounded() {
                let _ = writeln!(
                    out,
                    "note: {} path(s) cut at the loop bound; the result holds up to that bound",
                    stats.truncated_paths
                );
            }
        }
        Verdict::Reachable { model, path } => {
            let _ = writeln!(out, "REACHABLE");
            let _ = writeln!(out, "witness: {model}");
            let how = replay(program, model, path.len())?;
            let _ = writeln!(out, "replay: {how}");
        }
        Verdict::Timeout => {
            let _ = writeln!(out, "TIMEOUT");
        }
    }
    Ok(())
}

fn stats_line(out: &mut dyn Write, label: &str, s: &ExplorationStats) {
    let _ = writeln!(
        out,
        "{label}nodes {} subsumed {} infeasible {} leaves {} interpolants {} solver calls {} depth {} time {:.3}s",
        s.nodes_created,
        s.nodes_subsumed,
        s.infeasible_nodes,
        s.leaf_states,
        s.interpolants_stored,
        s.solver_calls,
        s.max_depth,
        s.wall_time.as_secs_f64()
    );
}

fn write_json(path: &Path, json: &str) -> Result<(), CliError> {
    std::fs::write(path, json).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn fail(err: &mut dyn Write, e: CliError) -> i32 {
    let _ = writeln!(err, "error: {e}");
    EXIT_ERROR
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match verify(args, out) {
        Ok(code) => code,
        Err(e) => fail(err, e),
    }
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let run = &args.run;
    let program = run.load()?;
    let (verdict, stats) = engine::run(&program, &run.config(), args.mode.into());
    let mut sink = std::io::sink();
    let out: &mut dyn Write = if run.quiet { &mut sink } else { out };
    summary(out, &program, &verdict, &stats)?;
    stats_line(out, "", &stats);
    if let Some(path) = &run.stats_out {
        write_json(path, &run.record(args.mode, &verdict, &stats).to_json())?;
    }
    Ok(exit_code(&verdict))
}

pub struct Comparison {
    pub dsei: (Verdict, ExplorationStats),
    pub vanilla: (Verdict, ExplorationStats),
    pub record: CompareRecord,
}

/// Runs both modes on the same program and configuration.
pub fn compare(program: &Program, run: &RunArgs) -> Comparison {
    let cfg = run.config();
    let dsei = engine::run(program, &cfg, engine::Mode::Dsei);
    let vanilla = engine::run(program, &cfg, engine::Mode::Vanilla);
    let record = CompareRecord::new(
        run.record(ModeName::Dsei, &dsei.0, &dsei.1),
        run.record(ModeName::Vanilla, &vanilla.0, &vanilla.1),
    );
    Comparison { dsei, vanilla, record }
}

pub fn cmd_compare(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match compare_cmd(args, out) {
        Ok(code) => code,
        Err(e) => fail(err, e),
    }
}

fn compare_cmd(run: &RunArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let program = run.load()?;
    let Comparison { dsei, vanilla, record } = compare(&program, run);
    let (d, v) = (record.dsei.verdict, record.vanilla.verdict);
    if d != v && d != VerdictKind::Timeout && v != VerdictKind::Timeout {
        return Err(CliError::Disagreement(d, v));
    }
    let mut sink = std::io::sink();
    let out: &mut dyn Write = if run.quiet { &mut sink } else { out };
    summary(out, &program, &dsei.0, &dsei.1)?;
    stats_line(out, "dsei:    ", &dsei.1);
    stats_line(out, "vanilla: ", &vanilla.1);
    let show = |x: Option<f64>| x.map_or("n/a".to_string(), |x| format!("{x:.1}x"));
    let _ = writeln!(out, "node ratio {} speedup {}", show(record.node_ratio), show(record.speedup));
    if let Some(path) = &run.stats_out {
        write_json(path, &record.to_json())?;
    }
    Ok(exit_code(&dsei.0))
}
