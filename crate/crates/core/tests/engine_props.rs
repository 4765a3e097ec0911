mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{concretely_reachable, random_program};
use interpolse::engine::{run_vanilla, verify, EngineConfig, Explorer, Mode, Strategy, Verdict};
use interpolse::lang::{execute_concrete, parse_program};

fn checked() -> EngineConfig {
    EngineConfig { check_contracts: true, ..EngineConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn verdicts_agree_with_vanilla_and_concrete_runs(seed in any::<u64>()) {
        let p = parse_program(&random_program(seed)).unwrap();
        let (dsei, stats) = verify(&p, &checked());
        let (vanilla, _) = run_vanilla(&p, &checked());
        let truth = concretely_reachable(&p);
        prop_assert_eq!(dsei.is_reachable(), truth, "{}", p);
        prop_assert_eq!(vanilla.is_reachable(), truth);
        prop_assert!(!matches!(dsei, Verdict::Timeout));
        prop_assert!(stats.nodes_subsumed <= stats.nodes_created);
        if let Verdict::Reachable { model, .. } = dsei {
            prop_assert!(execute_concrete(&p, &model, 10_000).unwrap().is_error());
        }
    }

    #[test]
    fn random_strategy_agrees_and_is_repeatable(seed in any::<u64>(), engine_seed in any::<u64>()) {
        let p = parse_program(&random_program(seed)).unwrap();
        let cfg = EngineConfig { strategy: Strategy::Random, seed: engine_seed, ..checked() };
        let (v1, s1) = verify(&p, &cfg);
        let (v2, s2) = verify(&p, &cfg);
        prop_assert_eq!(&v1, &v2);
        prop_assert_eq!(s1.without_time(), s2.without_time());
        prop_assert_eq!(v1.is_reachable(), concretely_reachable(&p));
    }

    #[test]
    fn dsei_tree_is_a_truncation_of_the_vanilla_tree(seed in any::<u64>()) {
        let p = parse_program(&random_program(seed)).unwrap();
        let cfg = EngineConfig { record_paths: true, ..EngineConfig::default() };
        let explored = |mode| {
            let mut ex = Explorer::with_mode(&p, cfg.clone(), mode);
            let _ = ex.run();
            ex.node_paths().iter().cloned().collect::<BTreeSet<_>>()
        };
        let (d, v) = (explored(Mode::Dsei), explored(Mode::Vanilla));
        prop_assert!(d.is_subset(&v));
    }
}

#[test]
fn loop_bound_cuts_are_reported() {
    let p = parse_program("sym a in [0, 3]\nvar i = 0\nwhile (i >= 0) { i = i + 1 }").unwrap();
    let cfg = EngineConfig { loop_bound: 5, ..EngineConfig::default() };
    let (v, stats) = verify(&p, &cfg);
    assert!(v.is_unreachable());
    assert_eq!(stats.truncated_paths, 1);
    let (v, stats) = run_vanilla(&p, &cfg);
    assert!(v.is_unreachable());
    assert_eq!(stats.truncated_paths, 1);
}

