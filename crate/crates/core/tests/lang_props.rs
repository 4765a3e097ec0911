mod common;

use proptest::prelude::*;

use common::random_program;
use interpolse::engine::{Event, EngineConfig, Explorer, Mode};
use interpolse::lang::{execute_traced, parse_program, Stmt};
use interpolse::solver::{is_sat, Formula, Model};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pretty_printing_round_trips(seed in any::<u64>()) {
        let p = parse_program(&random_program(seed)).unwrap();
        let q = parse_program(&p.pretty()).unwrap();
        prop_assert_eq!(p.system(), q.system());
        prop_assert!(p.system().validate().is_ok());
    }

    #[test]
    fn branch_guards_are_complements(seed in any::<u64>(), samples in prop::collection::vec((-5i64..=5, -5i64..=5, -9i64..=9, -9i64..=9, 0i64..3), 8)) {
        let p = parse_program(&random_program(seed)).unwrap();
        let ts = p.system();
        for q in ts.points() {
            let [t, e] = ts.outgoing(q) else { continue };
            let (Stmt::Assume(a), Stmt::Assume(b)) = (&ts.transition(*t).stmt, &ts.transition(*e).stmt) else {
                panic!("branch at {q} without assumes");
            };
            prop_assert!(!is_sat(&Formula::from_atoms([a.clone(), b.clone()])).unwrap().is_sat());
            for (va, vb, vx, vy, vi) in &samples {
                let m = Model::new().with("a", *va).with("b", *vb).with("x", *vx).with("y", *vy).with("i", *vi);
                let (ha, hb) = (a.eval_with(|v| m.get(v)).unwrap(), b.eval_with(|v| m.get(v)).unwrap());
                prop_assert!(ha != hb, "{} / {} under {}", a, b, m);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn concrete_runs_follow_symbolic_paths(seed in any::<u64>()) {
        let p = parse_program(&random_program(seed)).unwrap();
        let cfg = EngineConfig { record_events: true, record_paths: true, ..EngineConfig::default() };
        let mut ex = Explorer::with_mode(&p, cfg, Mode::Vanilla);
        let _ = ex.run();
        for e in ex.events() {
            let Event::Halted { node, model: Some(model), .. } = e else { continue };
            let mut input = model.clone();
            for s in p.symbolic_vars() {
                if input.get(&s.name).is_none() {
                    input.set(s.name.clone(), 0);
                }
            }
            let path = &ex.node_paths()[*node].1;
            let (_, trace) = execute_traced(&p, &input, 10_000).unwrap();
            prop_assert!(trace.len() == path.len() + 1 && trace[..path.len()] == path[..], "input {}", input);
        }
    }
}
