#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use interpolse::lang::{execute_concrete, Expr, Program, Stmt, Var};
use interpolse::solver::{entails, CanonRel, Domain, Formula, LinAtom, Model, Rel};

pub const RELS: [Rel; 6] = [Rel::Le, Rel::Lt, Rel::Ge, Rel::Gt, Rel::Eq, Rel::Ne];

pub fn vars(names: &[&str]) -> Vec<Var> {
    names.iter().map(|n| Var::new(n)).collect()
}

pub fn arb_expr(vars: Vec<Var>, coeff: i64) -> impl Strategy<Value = Expr> {
    prop::collection::vec(-coeff..=coeff, vars.len())
        .prop_map(move |cs| Expr::from_terms(vars.iter().cloned().zip(cs), 0))
}

/// A non-constant linear atom over `vars`.
pub fn arb_atom(vars: Vec<Var>, coeff: i64, k: i64) -> impl Strategy<Value = LinAtom> {
    (arb_expr(vars, coeff), 0..RELS.len(), -k..=k)
        .prop_filter("constant term", |(e, _, _)| !e.is_constant())
        .prop_map(|(e, r, k)| LinAtom::new(&e, RELS[r], &Expr::constant(k)))
}

pub fn arb_formula(vars: Vec<Var>, coeff: i64, k: i64, max_atoms: usize) -> impl Strategy<Value = Formula> {
    prop::collection::vec(arb_atom(vars, coeff, k), 0..=max_atoms).prop_map(Formula::from_atoms)
}

pub fn box_bounds(vars: &[Var], lo: i64, hi: i64) -> BTreeMap<Var, (i64, i64)> {
    vars.iter().map(|v| (v.clone(), (lo, hi))).collect()
}

pub fn box_formula(vars: &[Var], lo: i64, hi: i64) -> Formula {
    vars.iter()
        .flat_map(|v| {
            [
                LinAtom::new(&Expr::var(v.clone()), Rel::Ge, &Expr::constant(lo)),
                LinAtom::new(&Expr::var(v.clone()), Rel::Le, &Expr::constant(hi)),
            ]
        })
        .collect()
}

pub fn domain(vars: &[Var], lo: i64, hi: i64) -> Domain {
    Domain::uniform(vars, lo, hi).unwrap()
}

pub fn xyzw() -> Vec<Var> {
    vars(&["x", "y", "z", "w"])
}

pub fn loosen(a: &LinAtom, slack: i64) -> LinAtom {
    match a.rel() {
        CanonRel::Le | CanonRel::Eq => LinAtom::canonical(a.lhs().clone(), CanonRel::Le, a.bound() + slack),
        CanonRel::Ne => a.clone(),
    }
}

/// A conclusion entailed by `premise`: loosened premise atoms plus those
/// candidates the premise already entails.
pub fn conclusion(premise: &Formula, keep: &[bool], slack: &[i64], candidates: &[LinAtom]) -> Formula {
    let mut psi = Formula::truth();
    for ((a, k), s) in premise.atoms().iter().zip(keep).zip(slack) {
        if *k {
            psi.push(loosen(a, *s));
        }
    }
    for c in candidates {
        if entails(premise, &Formula::atom(c.clone())) {
            psi.push(c.clone());
        }
    }
    psi
}

pub fn abduction_case() -> impl Strategy<Value = (Formula, LinAtom, Formula)> {
    (
        arb_formula(xyzw(), 3, 8, 4),
        arb_atom(xyzw(), 3, 8),
        prop::collection::vec(any::<bool>(), 13),
        prop::collection::vec(0i64..3, 13),
        prop::collection::vec(arb_atom(xyzw(), 3, 8), 0..4),
    )
        .prop_map(|(phi, e, keep, slack, cands)| {
            let phi = phi.and(&box_formula(&xyzw(), -8, 8));
            let psi = conclusion(&phi.with(e.clone()), &keep, &slack, &cands);
            (phi, e, psi)
        })
}

/// Straight-line paths over inputs `a, b` and variables `x, y`.
pub fn path_case() -> impl Strategy<Value = Vec<Stmt>> {
    let ab_xy = vars(&["a", "b", "x", "y"]);
    let stmt = prop_oneof![
        (0usize..2, arb_expr(ab_xy.clone(), 2), -3i64..=3).prop_map(|(v, e, k)| {
            Stmt::Assign(Var::new(["x", "y"][v]), e.add(&Expr::constant(k)))
        }),
        arb_atom(ab_xy, 2, 6).prop_map(Stmt::Assume),
    ];
    prop::collection::vec(stmt, 1..7)
}

/// Small random programs: two bounded inputs, three program variables,
/// at most three branching statements and loops of at most two iterations.
pub fn random_program(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("sym a in [0, 3]\nsym b in [0, 3]\nvar x = 0\nvar y = 0\nvar i = 0\n");
    let mut budget = 3;
    let n = rng.gen_range(2..=5);
    for _ in 0..n {
        stmt(&mut rng, &mut out, &mut budget, 0);
    }
    if budget > 0 || !out.contains("assert") {
        out.push_str(&format!("assert({})\n", assertion(&mut rng)));
    }
    out
}

fn term(rng: &mut ChaCha8Rng) -> String {
    let mut parts = Vec::new();
    for v in ["a", "b", "x", "y"] {
        let c: i64 = rng.gen_range(-2..=2);
        if c != 0 {
            parts.push(format!("{c}*{v}"));
        }
    }
    parts.push(rng.gen_range(-3..=3i64).to_string());
    parts.join(" + ")
}

fn cond(rng: &mut ChaCha8Rng) -> String {
    let rel = ["<", "<=", ">", ">=", "==", "!="][rng.gen_range(0..6)];
    format!("{} {rel} {}", term(rng), rng.gen_range(-4..=4))
}

fn assertion(rng: &mut ChaCha8Rng) -> String {
    let rel = ["!=", "<=", ">=", "!="][rng.gen_range(0..4)];
    format!("{} {rel} {}", term(rng), rng.gen_range(-12..=12))
}

fn stmt(rng: &mut ChaCha8Rng, out: &mut String, budget: &mut u32, depth: usize) {
    let pad = "    ".repeat(depth);
    let kind = if *budget == 0 { 0 } else { rng.gen_range(0..4) };
    match kind {
        1 => {
            *budget -= 1;
            out.push_str(&format!("{pad}if ({}) {{\n", cond(rng)));
            stmt(rng, out, budget, depth + 1);
            out.push_str(&format!("{pad}}} else {{\n"));
            stmt(rng, out, budget, depth + 1);
            out.push_str(&format!("{pad}}}\n"));
        }
        2 => {
            *budget -= 1;
            out.push_str(&format!("{pad}i = 0\n{pad}while (i < a && i < 2) {{\n"));
            stmt(rng, out, &mut 0, depth + 1);
            out.push_str(&format!("{pad}    i = i + 1\n{pad}}}\n"));
        }
        3 => {
            *budget -= 1;
            out.push_str(&format!("{pad}assert({})\n", assertion(rng)));
        }
        _ => {
            let v = ["x", "y"][rng.gen_range(0..2)];
            out.push_str(&format!("{pad}{v} = {}\n", term(rng)));
        }
    }
}

/// Whether some input in `[0, 3]^2` drives `p` into an error.
pub fn concretely_reachable(p: &Program) -> bool {
    (0..=3).any(|a| {
        (0..=3).any(|b| {
            let m = Model::new().with("a", a).with("b", b);
            execute_concrete(p, &m, 10_000).unwrap().is_error()
        })
    })
}
