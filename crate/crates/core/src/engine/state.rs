use std::collections::BTreeMap;

use crate::lang::{Expr, Program, ProgramPoint, Stmt, Var};
use crate::solver::{Formula, LinAtom};

/// ⟨point, context⟩: a symbolic store σ mapping program variables to
/// expressions over the symbolic inputs, plus a path condition over those
/// inputs. Every entry remembers the step at which it was added so that
/// [`SymbolicState::context`] can list constraints in path order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicState {
    point: ProgramPoint,
    store: BTreeMap<Var, (Expr, u32)>,
    pc: Formula,
    pc_steps: Vec<u32>,
    counters: Vec<u32>,
    depth: u32,
}

impl SymbolicState {
    /// The state at the program's start point with every program variable
    /// at its initial value.
    pub fn initial(program: &Program) -> Self {
        SymbolicState {
            point: program.system().start(),
            store: program
                .program_vars()
                .iter()
                .map(|v| (v.name.clone(), (Expr::constant(v.init), 0)))
                .collect(),
            pc: Formula::truth(),
            pc_steps: Vec::new(),
            counters: vec![0; program.system().loop_heads().len()],
            depth: 0,
        }
    }

    pub fn point(&self) -> ProgramPoint {
        self.point
    }

    /// Path condition over symbolic variables.
    pub fn pc(&self) -> &Formula {
        &self.pc
    }

    /// Number of transitions taken from the initial state.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Back-edge traversals per loop head since the loop was last entered.
    pub fn counters(&self) -> &[u32] {
        &self.counters
    }

    pub fn store(&self) -> impl Iterator<Item = (&Var, &Expr)> {
        self.store.iter().map(|(v, (e, _))| (v, e))
    }

    /// σ(e): program variables replaced by their symbolic values.
    pub fn eval_expr(&self, e: &Expr) -> Expr {
        if e.terms().iter().all(|(v, _)| !self.store.contains_key(v)) {
            return e.clone();
        }
        let mut out = Expr::constant(e.constant_part());
        for (v, c) in e.terms() {
            match self.store.get(v) {
                Some((value, _)) => out = out.add_scaled(value, *c),
                None => out.add_term(v.clone(), *c),
            }
        }
        out
    }

    pub fn eval_atom(&self, a: &LinAtom) -> LinAtom {
        if a.lhs().terms().iter().all(|(v, _)| !self.store.contains_key(v)) {
            return a.clone();
        }
        let t = self.eval_expr(a.lhs());
        let k = a.bound() - t.constant_part();
        LinAtom::canonical(t.without_constant(), a.rel(), k)
    }

    pub fn eval_formula(&self, f: &Formula) -> Formula {
        f.atoms().iter().map(|a| self.eval_atom(a)).collect()
    }

    /// ⟦s⟧: the store as equalities `x = σ(x)` merged with the path
    /// condition, ordered by the step that introduced each constraint.
    pub fn context(&self) -> Formula {
        let mut entries: Vec<(u32, usize, LinAtom)> = Vec::with_capacity(self.store.len() + self.pc.len());
        for (i, (v, (e, step))) in self.store.iter().enumerate() {
            entries.push((*step, i, LinAtom::eq(Expr::var(v.clone()), e.clone())));
        }
        let offset = self.store.len();
        for (i, (a, step)) in self.pc.atoms().iter().zip(&self.pc_steps).enumerate() {
            entries.push((*step, offset + i, a.clone()));
        }
        entries.sort_by_key(|(step, i, _)| (*step, *i));
        entries.into_iter().map(|(_, _, a)| a).collect()
    }

    /// The state after executing `stmt` and arriving at `to`. Feasibility
    /// of the new path condition is not checked; loop counters are kept.
    pub fn step(&self, stmt: &Stmt, to: ProgramPoint) -> Self {
        let mut s = self.moved(to);
        match stmt {
            Stmt::Assign(x, e) => s.assign(x, e),
            Stmt::Assume(a) => s.constrain(self.eval_atom(a)),
            Stmt::Error | Stmt::Halt => {}
        }
        s
    }

    pub(crate) fn moved(&self, to: ProgramPoint) -> Self {
        let mut s = self.clone();
        s.point = to;
        s.depth += 1;
        s
    }

    pub(crate) fn assign(&mut self, x: &Var, e: &Expr) {
        let value = self.eval_expr(e);
        let step = self.depth;
        self.store.insert(x.clone(), (value, step));
    }

    /// Adds an already evaluated atom to the path condition.
    pub(crate) fn constrain(&mut self, a: LinAtom) {
        if a.is_true() || self.pc.atoms().contains(&a) {
            return;
        }
        self.pc.push(a);
        self.pc_steps.push(self.depth);
    }

    pub(crate) fn counters_mut(&mut self) -> &mut [u32] {
        &mut self.counters
    }
}
