//! Lowering of the surface syntax to a transition system.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::ast::{Ast, AstStmt, Cond};
use super::expr::{Expr, Var};
use super::system::{ProgramPoint, Stmt, Transition, TransitionSystem};
use super::LangError;
use crate::solver::LinAtom;

struct Builder<'a> {
    next: u32,
    trans: Vec<Transition>,
    loop_heads: BTreeSet<u32>,
    fold: &'a HashMap<Var, i64>,
}

impl Builder<'_> {
    fn fresh(&mut self) -> u32 {
        self.next += 1;
        self.next - 1
    }

    fn emit(&mut self, from: u32, to: u32, stmt: Stmt) {
        self.trans.push(Transition {
            from: ProgramPoint(from),
            to: ProgramPoint(to),
            stmt,
            back_edge: false,
        });
    }

    fn fold(&self, e: &Expr) -> Expr {
        let mut out = e.clone();
        for (v, _) in e.terms() {
            if let Some(k) = self.fold.get(v) {
                out = out.substitute(v, &Expr::constant(*k));
            }
        }
        out
    }

    fn sink(&mut self, stmt: Stmt) -> u32 {
        let p = self.fresh();
        let s = self.fresh();
        self.emit(p, s, stmt);
        p
    }

    fn block(&mut self, stmts: &[AstStmt], mut to: u32) -> u32 {
        for s in stmts.iter().rev() {
            to = self.stmt(s, to);
        }
        to
    }

    fn stmt(&mut self, s: &AstStmt, to: u32) -> u32 {
        match s {
            AstStmt::Assign { var, value, .. } => {
                let p = self.fresh();
                let value = self.fold(value);
                self.emit(p, to, Stmt::Assign(var.clone(), value));
                p
            }
            AstStmt::Assume(atoms) => {
                let mut to = to;
                for (l, r, rhs) in atoms.iter().rev() {
                    let a = LinAtom::new(&self.fold(l), *r, &self.fold(rhs));
                    if a.is_true() {
                        continue;
                    }
                    let p = self.fresh();
                    self.emit(p, to, Stmt::Assume(a));
                    to = p;
                }
                to
            }
            AstStmt::If { cond, then, els } => {
                let t = self.block(then, to);
                let f = self.block(els, to);
                let p = self.fresh();
                self.jump(p, cond, false, t, f);
                p
            }
            AstStmt::While { cond, body } => {
                let head = self.fresh();
                let entry = self.block(body, head);
                self.jump(head, cond, false, entry, to);
                // Every edge into the head that exists so far comes from the body.
                for t in self.trans.iter_mut().filter(|t| t.to.0 == head) {
                    t.back_edge = true;
                }
                self.loop_heads.insert(head);
                head
            }
            AstStmt::Assert(cond) => {
                let e = self.sink(Stmt::Error);
                let p = self.fresh();
                self.jump(p, cond, true, e, to);
                p
            }
            AstStmt::Error => self.sink(Stmt::Error),
            AstStmt::Halt => self.sink(Stmt::Halt),
        }
    }

    /// Branches from `p` to `t` when `cond` (negated if `neg`) holds and to
    /// `f` otherwise. The edge towards `t` is always emitted first.
    fn jump(&mut self, p: u32, cond: &Cond, neg: bool, t: u32, f: u32) {
        match (cond, neg) {
            (Cond::Atom(l, r, rhs), _) => {
                let a = LinAtom::new(&self.fold(l), *r, &self.fold(rhs));
                let a = if neg { a.negate() } else { a };
                let na = a.negate();
                self.emit(p, t, Stmt::Assume(a));
                self.emit(p, f, Stmt::Assume(na));
            }
            (Cond::Not(c), _) => self.jump(p, c, !neg, t, f),
            (Cond::And(a, b), false) | (Cond::Or(a, b), true) => {
                let q = self.fresh();
                self.jump(q, b, neg, t, f);
                self.jump(p, a, neg, q, f);
            }
            (Cond::Or(a, b), false) | (Cond::And(a, b), true) => {
                let q = self.fresh();
                self.jump(q, b, neg, t, f);
                self.jump(p, a, neg, t, q);
            }
        }
    }
}

fn collect_assigned(stmts: &[AstStmt], out: &mut HashSet<Var>) {
    for s in stmts {
        match s {
            AstStmt::Assign { var, .. } => {
                out.insert(var.clone());
            }
            AstStmt::If { then, els, .. } => {
                collect_assigned(then, out);
                collect_assigned(els, out);
            }
            AstStmt::While { body, .. } => collect_assigned(body, out),
            _ => {}
        }
    }
}

fn check_names(ast: &Ast) -> Result<(), LangError> {
    let mut syms = HashSet::new();
    let mut vars = HashSet::new();
    for s in &ast.syms {
        if !syms.insert(s.name.clone()) {
            return Err(LangError::SyntaxError(0, format!("`{}` is declared twice", s.name)));
        }
    }
    for v in &ast.vars {
        if syms.contains(&v.name) || !vars.insert(v.name.clone()) {
            return Err(LangError::SyntaxError(0, format!("`{}` is declared twice", v.name)));
        }
    }
    fn check_expr(e: &Expr, syms: &HashSet<Var>, vars: &HashSet<Var>) -> Result<(), LangError> {
        match e.terms().iter().find(|(v, _)| !syms.contains(v) && !vars.contains(v)) {
            Some((v, _)) => Err(LangError::UndeclaredVariable(v.to_string())),
            None => Ok(()),
        }
    }
    fn walk(stmts: &[AstStmt], syms: &HashSet<Var>, vars: &HashSet<Var>) -> Result<(), LangError> {
        for s in stmts {
            match s {
                AstStmt::Assign { var, value, line } => {
                    if syms.contains(var) {
                        return Err(LangError::SyntaxError(
                            *line,
                            format!("cannot assign to symbolic variable `{var}`"),
                        ));
                    }
                    if !vars.contains(var) {
                        return Err(LangError::UndeclaredVariable(var.to_string()));
                    }
                    check_expr(value, syms, vars)?;
                }
                AstStmt::Assume(atoms) => {
                    for (l, _, r) in atoms {
                        check_expr(l, syms, vars)?;
                        check_expr(r, syms, vars)?;
                    }
                }
                AstStmt::If { cond, then, els } => {
                    let mut res = Ok(());
                    cond.for_each_expr(&mut |e| {
                        if res.is_ok() {
                            res = check_expr(e, syms, vars);
                        }
                    });
                    res?;
                    walk(then, syms, vars)?;
                    walk(els, syms, vars)?;
                }
                AstStmt::While { cond, body } => {
                    let mut res = Ok(());
                    cond.for_each_expr(&mut |e| {
                        if res.is_ok() {
                            res = check_expr(e, syms, vars);
                        }
                    });
                    res?;
                    walk(body, syms, vars)?;
                }
                AstStmt::Assert(cond) => {
                    let mut res = Ok(());
                    cond.for_each_expr(&mut |e| {
                        if res.is_ok() {
                            res = check_expr(e, syms, vars);
                        }
                    });
                    res?;
                }
                AstStmt::Error | AstStmt::Halt => {}
            }
        }
        Ok(())
    }
    walk(&ast.body, &syms, &vars)
}

/// Lowers a checked syntax tree. Program variables that are never assigned
/// are replaced by their initial value.
pub(crate) fn lower(ast: &Ast) -> Result<TransitionSystem, LangError> {
    check_names(ast)?;
    let mut assigned = HashSet::new();
    collect_assigned(&ast.body, &mut assigned);
    let fold: HashMap<Var, i64> = ast
        .vars
        .iter()
        .filter(|v| !assigned.contains(&v.name))
        .map(|v| (v.name.clone(), v.init))
        .collect();
    let mut b = Builder {
        next: 0,
        trans: Vec::new(),
        loop_heads: BTreeSet::new(),
        fold: &fold,
    };
    let exit = b.sink(Stmt::Halt);
    let mut entry = b.block(&ast.body, exit);
    for s in ast.syms.iter().rev() {
        if let Some((lo, hi)) = s.bounds {
            let x = Expr::var(s.name.clone());
            for a in [LinAtom::le(x.clone(), Expr::constant(hi)), LinAtom::le(Expr::constant(lo), x)] {
                let p = b.fresh();
                b.emit(p, entry, Stmt::Assume(a));
                entry = p;
            }
        }
    }
    Ok(renumber(b, entry))
}

/// Numbers reachable points in depth-first preorder from `entry`, following
/// outgoing transitions in emission order, and drops unreachable ones.
fn renumber(b: Builder<'_>, entry: u32) -> TransitionSystem {
    let mut out: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, t) in b.trans.iter().enumerate() {
        out.entry(t.from.0).or_default().push(i);
    }
    let mut map: HashMap<u32, u32> = HashMap::new();
    let mut stack = vec![entry];
    while let Some(p) = stack.pop() {
        if map.contains_key(&p) {
            continue;
        }
        map.insert(p, map.len() as u32);
        if let Some(ts) = out.get(&p) {
            for &i in ts.iter().rev() {
                stack.push(b.trans[i].to.0);
            }
        }
    }
    let mut by_new: Vec<(u32, usize)> = b
        .trans
        .iter()
        .enumerate()
        .filter_map(|(i, t)| map.get(&t.from.0).map(|&n| (n, i)))
        .collect();
    by_new.sort();
    let transitions = by_new
        .into_iter()
        .map(|(_, i)| {
            let t = &b.trans[i];
            Transition {
                from: ProgramPoint(map[&t.from.0]),
                to: ProgramPoint(map[&t.to.0]),
                stmt: t.stmt.clone(),
                back_edge: t.back_edge,
            }
        })
        .collect();
    let loop_heads = b
        .loop_heads
        .iter()
        .filter_map(|h| map.get(h).map(|&n| ProgramPoint(n)))
        .collect();
    TransitionSystem::new(map.len() as u32, ProgramPoint(0), transitions, loop_heads)
}
