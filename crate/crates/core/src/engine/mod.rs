//! Dynamic symbolic execution with interpolation.
//!
//! The explorer walks the symbolic execution tree of a program. Every
//! completed subtree leaves an interpolant in a table keyed by program point;
//! later states at that point whose path condition entails the interpolant
//! are not explored again.
//!
//! ```
//! use interpolse::engine::{verify, EngineConfig, Verdict};
//! use interpolse::lang::parse_program;
//!
//! let p = parse_program("sym x in [0, 9]\nvar y = 0\nif (x > 4) { y = 1 }\nassert(y <= 1)").unwrap();
//! let (verdict, stats) = verify(&p, &EngineConfig::default());
//! assert!(matches!(verdict, Verdict::Unreachable(Some(_))));
//! assert!(stats.nodes_created > 0);
//! ```

mod explore;
mod state;
mod strategy;
mod table;

use std::time::Duration;

pub use explore::{Explorer, Stop};
pub use state::SymbolicState;
pub use strategy::{choose_next, Candidate, RandomPicker, Strategy};
pub use table::{Entry, SubsumptionTable};

use crate::interp::{Interpolant, Rule};
use crate::lang::{Program, ProgramPoint};
use crate::solver::{Formula, Model, SolverConfig};

/// Environment variable that turns on contract checking by default.
pub const DEBUG_ASSERT_ENV: &str = "INTERPOLSE_DEBUG_ASSERT";

pub const DEFAULT_LOOP_BOUND: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub strategy: Strategy,
    /// Back-edge traversals allowed per loop entry.
    pub loop_bound: u32,
    pub timeout: Option<Duration>,
    pub seed: u64,
    pub solver: SolverConfig,
    /// Re-check interpolant contracts with extra solver calls.
    pub check_contracts: bool,
    pub record_events: bool,
    pub record_paths: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            strategy: Strategy::Dfs,
            loop_bound: DEFAULT_LOOP_BOUND,
            timeout: None,
            seed: 0,
            solver: SolverConfig::default(),
            check_contracts: std::env::var(DEBUG_ASSERT_ENV).is_ok_and(|v| !v.is_empty() && v != "0"),
            record_events: false,
            record_paths: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    Dsei,
    /// Plain symbolic execution: no table, no interpolants.
    Vanilla,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DseiResult {
    Intp(Interpolant),
    /// The root state itself is infeasible.
    FalseMarker,
    ErrorFound(SymbolicState),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// An input reaching an error, with the transitions it takes.
    Reachable { model: Model, path: Vec<usize> },
    /// No error within the loop bound. Carries the root interpolant unless
    /// run without interpolation.
    Unreachable(Option<Interpolant>),
    Timeout,
}

impl Verdict {
    pub fn is_reachable(&self) -> bool {
        matches!(self, Verdict::Reachable { .. })
    }

    pub fn is_unreachable(&self) -> bool {
        matches!(self, Verdict::Unreachable(_))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExplorationStats {
    pub nodes_created: u64,
    pub nodes_subsumed: u64,
    pub infeasible_nodes: u64,
    pub solver_calls: u64,
    pub interpolants_stored: u64,
    pub max_depth: u32,
    pub wall_time: Duration,
    /// Halting, error and truncated leaves.
    pub leaf_states: u64,
    /// Paths cut by the loop bound.
    pub truncated_paths: u64,
    pub inconclusive: u64,
}

impl ExplorationStats {
    /// Whether the loop bound cut any path, so that an unreachable verdict
    /// only covers bounded executions.
    pub fn is_bounded(&self) -> bool {
        self.truncated_paths > 0
    }

    /// The same counters with the wall time zeroed.
    pub fn without_time(&self) -> ExplorationStats {
        ExplorationStats {
            wall_time: Duration::ZERO,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Created { node: usize, point: ProgramPoint, depth: u32 },
    Infeasible { node: usize, point: ProgramPoint },
    Subsumed { node: usize, point: ProgramPoint, by: Interpolant },
    Truncated { node: usize, point: ProgramPoint },
    /// A halting leaf with a model of its path condition, when known.
    Halted { node: usize, point: ProgramPoint, model: Option<Model> },
    /// `interpolant` came back to `node` over `transition`.
    Propagated { node: usize, point: ProgramPoint, transition: usize, rule: Rule, interpolant: Interpolant },
    Stored { node: usize, point: ProgramPoint, interpolant: Interpolant },
    ErrorFound { node: usize, point: ProgramPoint },
}

/// Explores from `state`, reusing and extending `table`.
pub fn dsei(
    program: &Program,
    state: SymbolicState,
    table: &mut SubsumptionTable,
    config: &EngineConfig,
) -> (Result<DseiResult, Stop>, ExplorationStats) {
    let mut ex = Explorer::new(program, config.clone())
        .with_table(std::mem::take(table))
        .from_state(state);
    let out = ex.run();
    let stats = ex.stats().clone();
    *table = ex.into_table();
    (out, stats)
}

/// Checks whether any error statement (or a halting state violating the
/// program's safety formula) is reachable.
pub fn verify(program: &Program, config: &EngineConfig) -> (Verdict, ExplorationStats) {
    run(program, config, Mode::Dsei)
}

/// Same question, answered by plain symbolic execution.
pub fn run_vanilla(program: &Program, config: &EngineConfig) -> (Verdict, ExplorationStats) {
    run(program, config, Mode::Vanilla)
}

pub fn run(program: &Program, config: &EngineConfig, mode: Mode) -> (Verdict, ExplorationStats) {
    let mut ex = Explorer::with_mode(program, config.clone(), mode);
    let out = ex.run();
    let keep = |psi: Interpolant| (mode == Mode::Dsei).then_some(psi);
    let verdict = match out {
        Ok(DseiResult::ErrorFound(_)) => {
            let (model, path) = ex.witness().expect("error node has a model");
            Verdict::Reachable { model, path }
        }
        Ok(DseiResult::Intp(psi)) => Verdict::Unreachable(keep(psi)),
        Ok(DseiResult::FalseMarker) => Verdict::Unreachable(keep(Interpolant::new(Formula::falsity()))),
        Err(_) => Verdict::Timeout,
    };
    (verdict, ex.stats().clone())
}
