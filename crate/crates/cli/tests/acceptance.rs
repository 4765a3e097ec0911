//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the report is printed even when the suite
//! succeeds. A check marked `known` is reported but does not fail the run.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

use common::*;
use interpolse::engine::{run_vanilla, verify, DseiResult, EngineConfig, Event, Explorer, SymbolicState, Verdict};
use interpolse::interp::{abduction, backprop, path_wp, Interpolant, Post, PropagationInput, Rule};
use interpolse::lang::{execute_concrete, parse_formula, parse_program, ConcreteOutcome, Program, ProgramPoint, Stmt};
use interpolse::solver::{entails, is_sat, Formula};
use interpolse_cli::{compare, gen_bitsum, gen_shortest_path, replay, RunArgs, StrategyName};

const TABLE_EDGES: &str = "1-2:20,1-3:35,1-4:110,2-3:40,2-4:90,3-4:60";

const ABDUCTION_EXAMPLE: &str = "\
sym t in [0, 1]
sym x in [0, 1]
var y = 0
var z = 0
z = 1
if (t > 0) { } else { y = 5 }
if (x > 0) {
    y = y - 33
    assert(x > -4)
    assert(x < 5)
    assert(y < z)
} else {
    y = y + 1
    assert(x > -6)
    assert(x < 3)
    assert(y > z - 1)
}
";

struct Check {
    label: String,
    ok: bool,
    detail: String,
    /// Expected to fail; reported without failing the run.
    known: bool,
}

fn check(label: &str, ok: bool, detail: impl Into<String>) -> Check {
    Check { label: label.into(), ok, detail: detail.into(), known: false }
}

#[derive(Default)]
struct Report {
    unexpected: Vec<String>,
}

impl Report {
    fn criterion(&mut self, id: u32, title: &str, limit_s: u64, body: impl FnOnce() -> Vec<Check>) {
        let start = Instant::now();
        let checks = body();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(limit_s);
        let ok = in_time && checks.iter().all(|c| c.ok);
        println!(
            "{} {id} {title} [{:.2}s, limit {limit_s}s]",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
        if !in_time {
            self.unexpected.push(format!("{id}: over time"));
        }
        for c in &checks {
            let mark = match (c.ok, c.known) {
                (true, _) => "ok  ",
                (false, true) => "KNOWN",
                (false, false) => "FAIL",
            };
            println!("    {mark} {}: {}", c.label, c.detail);
            if !c.ok && !c.known {
                self.unexpected.push(format!("{id}: {}", c.label));
            }
        }
    }
}

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn equivalent(a: &Formula, b: &Formula) -> bool {
    entails(a, b) && entails(b, a)
}

fn recording() -> EngineConfig {
    EngineConfig { record_events: true, check_contracts: true, ..EngineConfig::default() }
}

/// Draws `n` values from `s` with a fixed seed, keeping those accepted by `keep`.
fn sample<S: Strategy>(s: S, n: usize, mut keep: impl FnMut(&S::Value) -> bool) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = s.new_tree(&mut runner).unwrap().current();
        if keep(&v) {
            out.push(v);
        }
    }
    out
}

fn point_of_increment(p: &Program, var: &str, k: i64) -> ProgramPoint {
    p.system()
        .transitions()
        .iter()
        .find(|t| matches!(&t.stmt, Stmt::Assign(x, e) if x.name() == var && e.constant_part() == k))
        .unwrap()
        .from
}

fn shortest_path_regression() -> Vec<Check> {
    let p = parse_program(&gen_shortest_path(4, &TABLE_EDGES.parse().unwrap(), 90).unwrap()).unwrap();
    let mut ex = Explorer::new(&p, recording());
    let root = match ex.run() {
        Ok(DseiResult::Intp(psi)) => psi,
        other => return vec![check("verdict", false, format!("{other:?}"))],
    };
    let p3 = point_of_increment(&p, "d", 60);
    let first = ex.events().iter().find_map(|e| match e {
        Event::Stored { point, interpolant, .. } if *point == p3 => Some(interpolant.clone()),
        _ => None,
    });
    let at_3b = f("node == 3 && d == 35");
    let subsumed_3b = ex.events().iter().any(|e| match e {
        Event::Subsumed { by, .. } => entails(&at_3b, by.formula()) && entails(by.formula(), &f("d >= 30")),
        _ => false,
    });
    let (_, vanilla) = run_vanilla(&p, &EngineConfig::default());
    vec![
        check("verdict", true, "unreachable"),
        match first {
            Some(psi) => check("first interpolant at vertex 3 is d >= 30", equivalent(psi.formula(), &f("d >= 30")), psi.to_string()),
            None => check("first interpolant at vertex 3 is d >= 30", false, "nothing stored"),
        },
        check("root interpolant entails d >= -5", entails(root.formula(), &f("d >= -5")), root.to_string()),
        check(
            "vertex 3 reached over the 35 edge is subsumed",
            subsumed_3b && ex.stats().nodes_subsumed >= 1,
            format!("dsei subsumed {}", ex.stats().nodes_subsumed),
        ),
        check("vanilla subsumes nothing", vanilla.nodes_subsumed == 0, format!("vanilla subsumed {}", vanilla.nodes_subsumed)),
    ]
}

fn shortest_path_bound() -> Vec<Check> {
    let p = parse_program(&gen_shortest_path(4, &TABLE_EDGES.parse().unwrap(), 95).unwrap()).unwrap();
    let timed = |p: &Program| {
        let start = Instant::now();
        let v = verify(p, &EngineConfig::default()).0;
        (v, start.elapsed())
    };
    let (v95, t95) = timed(&p);
    let p96 = p.with_initial("BOUND", 96).unwrap();
    let (v96, t96) = timed(&p96);
    let witness = match &v96 {
        Verdict::Reachable { model, path } => {
            let replayed = replay(&p96, model, path.len());
            let d = match execute_concrete(&p96, model, 10_000) {
                Ok(ConcreteOutcome::HitError { store, .. }) => Some(store[&"d".into()]),
                _ => None,
            };
            check(
                "BOUND = 96 reachable, witness replays with distance 95",
                replayed.is_ok() && d == Some(95) && t96 < Duration::from_secs(1),
                format!("{model}, distance {d:?}, {:.3}s", t96.as_secs_f64()),
            )
        }
        other => check("BOUND = 96 reachable", false, format!("{other:?}")),
    };
    vec![
        check(
            "BOUND = 95 unreachable",
            v95.is_unreachable() && t95 < Duration::from_secs(1),
            format!("{:.3}s", t95.as_secs_f64()),
        ),
        witness,
    ]
}

/// The branch point of bit `i + 1`, where `k1..ki` are fixed.
fn level_point(p: &Program, n: usize, i: usize) -> ProgramPoint {
    let ts = p.system();
    if i == n {
        let to = ts
            .transitions()
            .iter()
            .find(|t| matches!(&t.stmt, Stmt::Assign(x, _) if x.name() == format!("k{n}")))
            .unwrap()
            .to;
        return to;
    }
    ts.transitions()
        .iter()
        .find(|t| {
            ts.outgoing(t.from).len() == 2
                && matches!(&t.stmt, Stmt::Assume(a) if a.to_string().contains(&format!("b{}", i + 1)))
        })
        .unwrap()
        .from
}

fn bitsum_scaling() -> Vec<Check> {
    let sizes = [8usize, 12, 16, 20];
    let mut nodes = Vec::new();
    let mut all_unreachable = true;
    let mut literal = Vec::new();
    let mut reindexed = true;
    let mut level_detail = Vec::new();
    for &n in &sizes {
        let p = parse_program(&gen_bitsum(n)).unwrap();
        let mut ex = Explorer::new(&p, EngineConfig::default());
        all_unreachable &= matches!(ex.run(), Ok(DseiResult::Intp(_)));
        nodes.push(ex.stats().nodes_created);
        for i in [1, n / 2, n - 1] {
            let stored = &ex.table().at(level_point(&p, n, i))[0].interpolant;
            let sum = (1..=i).map(|j| format!("k{j}")).collect::<Vec<_>>().join(" + ");
            let claimed = f(&format!("{sum} >= {} && {sum} <= {}", i as i64 - n as i64, n - i));
            let tight = f(&format!("{sum} >= -{i} && {sum} <= {i}"));
            literal.push(((n, i), equivalent(stored.formula(), &claimed)));
            reindexed &= equivalent(stored.formula(), &tight);
            if n == 8 {
                level_detail.push(format!("i={i}: {stored}"));
            }
        }
    }
    // a single bit: the level-1 interpolant sits where the assertions start
    let one = parse_program(&gen_bitsum(1)).unwrap();
    let mut ex = Explorer::new(&one, EngineConfig::default());
    let _ = ex.run();
    let single = ex.table().at(level_point(&one, 1, 1))[0].interpolant.clone();
    let single_literal = equivalent(single.formula(), &f("k1 == 0"));
    reindexed &= equivalent(single.formula(), &f("k1 >= -1 && k1 <= 1"));

    let per_bit: Vec<f64> = nodes.iter().zip(sizes).map(|(&c, n)| c as f64 / n as f64).collect();
    let linear = per_bit.iter().all(|r| (r / per_bit[0] - 1.0).abs() <= 0.2);
    let (_, vanilla) = run_vanilla(&parse_program(&gen_bitsum(12)).unwrap(), &EngineConfig::default());
    let holding: Vec<String> = literal.iter().filter(|(_, ok)| *ok).map(|((n, i), _)| format!("N={n},i={i}")).collect();
    vec![
        check("all unreachable", all_unreachable, format!("nodes {nodes:?}")),
        check(
            "nodes(N)/N within 20% of nodes(8)/8",
            linear,
            format!("per bit {:?}", per_bit.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()),
        ),
        check("vanilla at N=12 has >= 4096 leaves", vanilla.leaf_states >= 4096, format!("{} leaves", vanilla.leaf_states)),
        Check {
            label: "level i interpolant == -N+i <= S_i <= N-i".into(),
            ok: literal.iter().all(|(_, ok)| *ok) && single_literal,
            detail: format!(
                "holds only at {holding:?}; for i > N/2 it excludes the reachable S_i = i, and N=1 gives k1 == 0, \
                 which excludes both values of k1"
            ),
            known: true,
        },
        check(
            "level i interpolant == -i <= S_i <= i (N=1 included)",
            reindexed,
            format!("N=8 {}; N=1 {single}", level_detail.join(", ")),
        ),
    ]
}

fn abduction_regression() -> Vec<Check> {
    let p = parse_program(ABDUCTION_EXAMPLE).unwrap();
    let mut ex = Explorer::new(&p, recording());
    if let Err(e) = ex.run() {
        return vec![check("run", false, format!("{e:?}"))];
    }
    let then_target = point_of_increment(&p, "y", -33);
    let two = p.system().transitions().iter().find(|t| t.to == then_target).unwrap().from;
    let abduced: Vec<Formula> = ex
        .events()
        .iter()
        .filter_map(|e| match e {
            Event::Propagated { point, rule: Rule::Abduction, interpolant, .. } if *point == two => {
                Some(interpolant.formula().clone())
            }
            _ => None,
        })
        .collect();
    if abduced.len() != 2 {
        return vec![check("two abduction results at the branch", false, format!("{abduced:?}"))];
    }
    let subsumed = ex.events().iter().filter(|e| matches!(e, Event::Subsumed { point, .. } if *point == two)).count();
    let context_2b = f("y == 5 && z == 1 && x >= 0 && x <= 1 && t >= 0 && t <= 0");
    let core = f("x > -1 && x < 2 && y == 0 && z == 1");
    vec![
        check("then side: -1<x<2 && y<z+33", equivalent(&abduced[0], &f("x > -1 && x < 2 && y < z + 33")), abduced[0].to_string()),
        check("else side: -1<x<2 && y>z-2", equivalent(&abduced[1], &f("x > -1 && x < 2 && y > z - 2")), abduced[1].to_string()),
        check("second visit of the branch is subsumed", subsumed == 1, format!("{subsumed} subsumed")),
        check("the unsat core does not cover it", !entails(&context_2b, &core), core.to_string()),
    ]
}

fn abduction_soundness() -> Vec<Check> {
    let d = domain(&xyzw(), -8, 8);
    let cases = sample(abduction_case(), 1000, |_| true);
    let (mut by_solver, mut by_enum, mut premise) = (0, 0, 0);
    for (phi, e, psi) in &cases {
        premise += usize::from(!d.entails(&phi.with(e.clone()), psi).unwrap());
        let r = match abduction(phi, e, psi) {
            Ok(r) => r.into_formula(),
            Err(_) => {
                by_solver += 1;
                continue;
            }
        };
        by_solver += usize::from(!entails(phi, &r) || !entails(&r.with(e.clone()), psi));
        by_enum += usize::from(!d.entails(phi, &r).unwrap() || !d.entails(&r.with(e.clone()), psi).unwrap());
    }
    vec![
        check("premise phi && e |= psi holds", premise == 0, format!("{premise} bad cases")),
        check("solver: phi |= R and R && e |= psi", by_solver == 0, format!("{by_solver} violations of 1000")),
        check("enumeration on [-8, 8]", by_enum == 0, format!("{by_enum} violations of 1000")),
    ]
}

fn frame_rules() -> Vec<Check> {
    let sat = |a: &Formula| is_sat(a).unwrap().is_sat();
    let xy = || vars(&["x", "y"]);
    let uw = || vars(&["u", "w"]);
    let first = sample(
        (arb_formula(xy(), 3, 6, 3), arb_formula(xy(), 3, 6, 2), arb_formula(uw(), 3, 6, 3)),
        1000,
        |(_, _, c)| sat(c),
    );
    let v1 = first.iter().filter(|(a, b, c)| entails(a, b) != entails(&c.and(a), &c.and(b))).count();
    let second = sample(
        (arb_formula(uw(), 3, 6, 3), arb_formula(xy(), 3, 6, 3), arb_formula(xy(), 3, 6, 2)),
        1000,
        |(a, _, _)| sat(a),
    );
    let v2 = second.iter().filter(|(a, b, c)| entails(&a.and(b), c) && !entails(b, c)).count();
    vec![
        check("A |= B iff C && A |= C && B", v1 == 0, format!("{v1} violations of 1000")),
        check("A && B |= C implies B |= C", v2 == 0, format!("{v2} violations of 1000")),
    ]
}

fn soundness() -> Vec<Check> {
    let (mut disagree, mut reachable, mut bad_witness) = (0, 0, 0);
    for seed in 0..500 {
        let p = parse_program(&random_program(seed)).unwrap();
        let (dsei, _) = verify(&p, &EngineConfig::default());
        let (vanilla, _) = run_vanilla(&p, &EngineConfig::default());
        let truth = concretely_reachable(&p);
        reachable += usize::from(truth);
        let conclusive = !matches!(dsei, Verdict::Timeout) && !matches!(vanilla, Verdict::Timeout);
        if !conclusive || dsei.is_reachable() != truth || vanilla.is_reachable() != truth {
            disagree += 1;
        }
        if let Verdict::Reachable { model, .. } = &dsei {
            bad_witness += usize::from(!execute_concrete(&p, model, 10_000).unwrap().is_error());
        }
    }
    vec![
        check("dsei == vanilla == exhaustive runs", disagree == 0, format!("{disagree} disagreements, {reachable} of 500 reachable")),
        check("witnesses reach an error", bad_witness == 0, format!("{bad_witness} bad witnesses")),
    ]
}

fn dominance() -> Vec<Check> {
    let p = parse_program("sym a in [-8, 8]\nsym b in [-8, 8]\nvar x = 0\nvar y = 0\nx = a\ny = b").unwrap();
    let prefix: Vec<Stmt> = p.system().transitions().iter().map(|t| t.stmt.clone()).collect();
    let abxy = vars(&["a", "b", "x", "y"]);
    let d = domain(&abxy, -8, 8);
    let states = |path: &[Stmt]| {
        let mut out = vec![SymbolicState::initial(&p)];
        for s in path {
            let next = out.last().unwrap().step(s, out.last().unwrap().point());
            out.push(next);
        }
        out
    };
    let cases = sample(
        (path_case(), proptest::collection::vec(arb_atom(abxy.clone(), 2, 10), 1..4)),
        200,
        |(body, _)| {
            let path: Vec<Stmt> = prefix.iter().cloned().chain(body.iter().cloned()).collect();
            is_sat(states(&path).last().unwrap().pc()).unwrap().is_sat()
        },
    );
    let (mut steps, mut violations) = (0, 0);
    for (body, candidates) in cases {
        let path: Vec<Stmt> = prefix.iter().cloned().chain(body).collect();
        let st = states(&path);
        let ctx = st.last().unwrap().context();
        let phi: Formula = candidates.into_iter().filter(|c| entails(&ctx, &Formula::atom(c.clone()))).collect();
        let mut psi = Interpolant::new(phi.clone());
        for i in (0..path.len()).rev() {
            let input = PropagationInput { context: st[i].context(), stmt: Some(path[i].clone()), post: Post::Intp(psi) };
            psi = backprop(&input).unwrap();
            steps += 1;
            let wp = path_wp(&path[i..], &phi.to_bool_expr());
            violations += usize::from(!d.entails(psi.formula(), &wp).unwrap());
        }
    }
    vec![check(
        "propagated interpolant |= path_wp on [-8, 8]",
        violations == 0,
        format!("{violations} violations over 200 paths, {steps} steps"),
    )]
}

fn compare_smoke() -> Vec<Check> {
    let program = parse_program(&gen_bitsum(16)).unwrap();
    let args = RunArgs {
        program: PathBuf::from("bitsum_16.prog"),
        strategy: StrategyName::Dfs,
        seed: 0,
        loop_bound: 64,
        timeout: 600.0,
        stats_out: None,
        bound: None,
        quiet: true,
    };
    let r = compare(&program, &args).record;
    let ratio = r.node_ratio.unwrap_or(0.0);
    vec![check(
        "dsei/vanilla node ratio >= 50 on 16 bits",
        ratio >= 50.0,
        format!(
            "dsei {} nodes, vanilla {} nodes, ratio {ratio:.0}, speedup {:.1}",
            r.dsei.stats.nodes_created,
            r.vanilla.stats.nodes_created,
            r.speedup.unwrap_or(0.0)
        ),
    )]
}

fn main() -> ExitCode {
    let mut report = Report::default();
    report.criterion(1, "shortest-path regression", 1, shortest_path_regression);
    report.criterion(2, "shortest-path bound tightening", 2, shortest_path_bound);
    report.criterion(3, "bit-sum subsumption and linear scaling", 30, bitsum_scaling);
    report.criterion(4, "abduction beyond the unsat core", 1, abduction_regression);
    report.criterion(5, "abduction soundness, 1000 triples", 60, abduction_soundness);
    report.criterion(6, "frame rules, 1000 instances each", 60, frame_rules);
    report.criterion(7, "soundness cross-check, 500 programs", 120, soundness);
    report.criterion(8, "interpolants dominate path wp, 200 paths", 60, dominance);
    report.criterion(9, "compare smoke report on 16 bits", 120, compare_smoke);
    if report.unexpected.is_empty() {
        println!("acceptance: no unexpected failures");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures {:?}", report.unexpected);
        ExitCode::FAILURE
    }
}
