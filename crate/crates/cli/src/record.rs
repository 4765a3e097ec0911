//! Machine-readable run statistics.

use std::collections::BTreeMap;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use interpolse::engine::{self, ExplorationStats, Verdict};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Dsei,
    Vanilla,
}

impl From<ModeName> for engine::Mode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Dsei => engine::Mode::Dsei,
            ModeName::Vanilla => engine::Mode::Vanilla,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StrategyName {
    #[default]
    Dfs,
    Random,
}

impl From<StrategyName> for engine::Strategy {
    fn from(s: StrategyName) -> Self {
        match s {
            StrategyName::Dfs => engine::Strategy::Dfs,
            StrategyName::Random => engine::Strategy::Random,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    Reachable,
    Unreachable,
    Timeout,
}

impl From<&Verdict> for VerdictKind {
    fn from(v: &Verdict) -> Self {
        match v {
            Verdict::Reachable { .. } => VerdictKind::Reachable,
            Verdict::Unreachable(_) => VerdictKind::Unreachable,
            Verdict::Timeout => VerdictKind::Timeout,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsRecord {
    pub nodes_created: u64,
    pub nodes_subsumed: u64,
    pub infeasible_nodes: u64,
    pub solver_calls: u64,
    pub interpolants_stored: u64,
    pub max_depth: u32,
    pub wall_time_s: f64,
    pub leaf_states: u64,
    pub truncated_paths: u64,
    pub inconclusive: u64,
}

impl From<&ExplorationStats> for StatsRecord {
    fn from(s: &ExplorationStats) -> Self {
        StatsRecord {
            nodes_created: s.nodes_created,
            nodes_subsumed: s.nodes_subsumed,
            infeasible_nodes: s.infeasible_nodes,
            solver_calls: s.solver_calls,
            interpolants_stored: s.interpolants_stored,
            max_depth: s.max_depth,
            wall_time_s: s.wall_time.as_secs_f64(),
            leaf_states: s.leaf_states,
            truncated_paths: s.truncated_paths,
            inconclusive: s.inconclusive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub program_path: String,
    pub mode: ModeName,
    pub strategy: StrategyName,
    pub seed: u64,
    pub loop_bound: u32,
    pub timeout_s: Option<f64>,
    pub verdict: VerdictKind,
    pub witness: Option<BTreeMap<String, i64>>,
    pub stats: StatsRecord,
    pub tool_version: String,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records always serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<RunRecord> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> std::io::Result<RunRecord> {
        let text = std::fs::read_to_string(path)?;
        RunRecord::from_json(&text).map_err(std::io::Error::other)
    }
}

/// Two runs of the same program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRecord {
    pub dsei: RunRecord,
    pub vanilla: RunRecord,
    /// Vanilla wall time over DSEI wall time.
    pub speedup: Option<f64>,
    /// Vanilla node count over DSEI node count.
    pub node_ratio: Option<f64>,
}

impl CompareRecord {
    pub fn new(dsei: RunRecord, vanilla: RunRecord) -> Self {
        let ratio = |a: f64, b: f64| (b > 0.0).then(|| a / b);
        let speedup = ratio(vanilla.stats.wall_time_s, dsei.stats.wall_time_s);
        let node_ratio = ratio(vanilla.stats.nodes_created as f64, dsei.stats.nodes_created as f64);
        CompareRecord { dsei, vanilla, speedup, node_ratio }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records always serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<CompareRecord> {
        serde_json::from_str(text)
    }
}
