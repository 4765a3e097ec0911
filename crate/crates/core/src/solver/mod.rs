//! Decision procedures for conjunctions of linear integer atoms.
//!
//! Satisfiability goes through exact Fourier–Motzkin elimination with
//! branch-and-bound; [`enumerate_models`] is an independent brute-force
//! evaluator meant for tests.

mod atom;
mod enumerate;
mod fm;
mod formula;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

pub use atom::{CanonRel, LinAtom, Rel};
pub use enumerate::{enumerate_models, Compiled, Domain, DEFAULT_ENUMERATION_CAP};
pub use formula::{BoolExpr, Constraint, Formula, Model};

use crate::lang::{Expr, Var};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Var),
    #[error("enumeration domain of {size} points exceeds the cap of {cap}")]
    DomainTooLarge { size: u128, cap: u64 },
    #[error("solver budget exceeded (branch depth {0})")]
    BudgetExceeded(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn model(self) -> Option<Model> {
        match self {
            SatResult::Sat(m) => Some(m),
            SatResult::Unsat => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Maximum nesting of branch-and-bound and disequality splits.
    pub branch_depth: u32,
    /// Row-count ceiling for a single elimination; beyond it the query is
    /// reported as over budget.
    pub max_rows: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            branch_depth: 64,
            max_rows: 20_000,
        }
    }
}

/// A solver handle: configuration plus a counter of decision-procedure runs.
///
/// Holds no incremental state; every query is independent.
#[derive(Debug, Default)]
pub struct Solver {
    config: SolverConfig,
    calls: AtomicU64,
}

impl Clone for Solver {
    fn clone(&self) -> Self {
        Solver {
            config: self.config.clone(),
            calls: AtomicU64::new(self.calls()),
        }
    }
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        Solver {
            config,
            calls: AtomicU64::new(0),
        }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Number of satisfiability checks that reached the decision procedure.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn is_sat(&self, f: &Formula) -> Result<SatResult, SolverError> {
        if f.has_false_atom() {
            return Ok(SatResult::Unsat);
        }
        if f.is_empty() {
            return Ok(SatResult::Sat(Model::new()));
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        let mut model = Model::new();
        for component in components(f.atoms()) {
            match self.solve_component(&component)? {
                Some(m) => m.iter().for_each(|(v, x)| model.set(v.clone(), x)),
                None => return Ok(SatResult::Unsat),
            }
        }
        debug_assert_eq!(f.eval(&model), Ok(true), "solver produced a non-model for {f}");
        Ok(SatResult::Sat(model))
    }

    fn solve_component(&self, atoms: &[&LinAtom]) -> Result<Option<Model>, SolverError> {
        let vars: Vec<Var> = atoms
            .iter()
            .flat_map(|a| a.lhs().terms().iter().map(|(v, _)| v.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<&Var, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut rows = Vec::new();
        let mut nes = Vec::new();
        for a in atoms {
            let mut coeffs: fm::Coeffs = a
                .lhs()
                .terms()
                .iter()
                .map(|(v, c)| (index[v], BigInt::from(*c)))
                .collect();
            coeffs.sort_by_key(|(i, _)| *i);
            let rhs = BigInt::from(a.bound());
            match a.rel() {
                CanonRel::Le => rows.push(fm::Row { coeffs, rhs, eq: false }),
                CanonRel::Eq => rows.push(fm::Row { coeffs, rhs, eq: true }),
                CanonRel::Ne => nes.push((coeffs, rhs)),
            }
        }
        let limits = fm::Limits {
            branch_depth: self.config.branch_depth,
            max_rows: self.config.max_rows,
        };
        match fm::solve_integer(rows, &nes, vars.len(), &limits, 0) {
            Ok(None) => Ok(None),
            Ok(Some(values)) => {
                let mut m = Model::new();
                for (v, x) in vars.into_iter().zip(values) {
                    let x = x
                        .to_i64()
                        .ok_or(SolverError::BudgetExceeded(self.config.branch_depth))?;
                    m.set(v, x);
                }
                Ok(Some(m))
            }
            Err(_) => Err(SolverError::BudgetExceeded(self.config.branch_depth)),
        }
    }

    /// `f ⊨ g`. A query that runs out of budget counts as "not entailed".
    pub fn entails(&self, f: &Formula, g: &Formula) -> bool {
        self.try_entails(f, g, false).unwrap_or(false)
    }

    /// `f ⊨ g` for an `f` the caller already knows to be satisfiable. Skips
    /// the final satisfiability check of the frame outside `g`'s variables.
    pub fn entails_sat(&self, f: &Formula, g: &Formula) -> bool {
        self.try_entails(f, g, true).unwrap_or(false)
    }

    pub fn try_entails(&self, f: &Formula, g: &Formula, f_known_sat: bool) -> Result<bool, SolverError> {
        let mut frame_needed = false;
        for a in g.atoms() {
            if a.is_true() || f.atoms().contains(a) || implied_by_bound(f, a) {
                continue;
            }
            let local = connected_part(f, a);
            if local.has_false_atom() {
                return Ok(true);
            }
            let refuted = match a.rel() {
                CanonRel::Le | CanonRel::Ne => self.refutes(&local, a.negate())?,
                CanonRel::Eq => {
                    let below = LinAtom::canonical(a.lhs().clone(), CanonRel::Le, a.bound() - 1);
                    let above = LinAtom::canonical(a.lhs().neg(), CanonRel::Le, -a.bound() - 1);
                    self.refutes(&local, below)? && self.refutes(&local, above)?
                }
            };
            if !refuted {
                if f_known_sat {
                    return Ok(false);
                }
                frame_needed = true;
                break;
            }
        }
        if !frame_needed {
            return Ok(true);
        }
        // Some local counter-model exists; it extends to all of `f` iff `f` is sat.
        Ok(!self.is_sat(f)?.is_sat())
    }

    fn refutes(&self, f: &Formula, a: LinAtom) -> Result<bool, SolverError> {
        if a.is_false() {
            return Ok(true);
        }
        Ok(!self.is_sat(&f.with(a))?.is_sat())
    }
}

/// `f` already holds `t ≤ k'` with `k' ≤ k` for the same term `t`.
fn implied_by_bound(f: &Formula, a: &LinAtom) -> bool {
    a.rel() == CanonRel::Le
        && f
            .atoms()
            .iter()
            .any(|b| b.rel() == CanonRel::Le && b.lhs() == a.lhs() && b.bound() <= a.bound())
}

/// Atoms of `f` transitively sharing variables with `a`.
fn connected_part(f: &Formula, a: &LinAtom) -> Formula {
    let mut vars = a.free_vars();
    let mut taken = vec![false; f.len()];
    loop {
        let mut grew = false;
        for (i, b) in f.atoms().iter().enumerate() {
            if !taken[i] && b.lhs().terms().iter().any(|(v, _)| vars.contains(v)) {
                taken[i] = true;
                vars.extend(b.free_vars());
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let mut out: Formula = f
        .atoms()
        .iter()
        .zip(&taken)
        .filter(|(_, t)| **t)
        .map(|(b, _)| b.clone())
        .collect();
    if f.has_false_atom() {
        out.push(LinAtom::falsity());
    }
    out
}

/// Groups atoms into variable-connected components.
fn components(atoms: &[LinAtom]) -> Vec<Vec<&LinAtom>> {
    let mut parent: Vec<usize> = (0..atoms.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut owner: HashMap<&Var, usize> = HashMap::new();
    for (i, a) in atoms.iter().enumerate() {
        for (v, _) in a.lhs().terms() {
            match owner.get(v) {
                Some(&j) => {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
                None => {
                    owner.insert(v, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<&LinAtom>> = BTreeMap::new();
    for (i, a) in atoms.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(a);
    }
    groups.into_values().collect()
}

pub fn is_sat(f: &Formula) -> Result<SatResult, SolverError> {
    Solver::default().is_sat(f)
}

pub fn entails(f: &Formula, g: &Formula) -> bool {
    Solver::default().entails(f, g)
}

pub fn eval_formula<C: Constraint>(f: &C, m: &Model) -> Result<bool, SolverError> {
    f.eval(m)
}

pub fn substitute<C: Constraint>(f: &C, v: &Var, e: &Expr) -> C {
    f.substitute(v, e)
}

pub fn free_vars<C: Constraint>(f: &C) -> BTreeSet<Var> {
    f.free_vars()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn substitution_examples() {
        let x = Var::new("x");
        let r = substitute(&f("x < 7"), &x, &Expr::var("x").add(&Expr::constant(5)));
        assert_eq!(r, f("x < 2"));
        let r = substitute(&f("y == 3"), &x, &Expr::var("x").add(&Expr::constant(1)));
        assert_eq!(r, f("y == 3"));
        let r = substitute(&f("2*x + y <= 4"), &Var::new("y"), &Expr::var("x").sub(&Expr::constant(1)));
        assert_eq!(r, f("3*x <= 5"));
    }

    #[test]
    fn satisfiability_examples() {
        assert_eq!(is_sat(&f("x >= 1 && x <= 0")), Ok(SatResult::Unsat));
        assert_eq!(is_sat(&f("x > 0 && x < 2")), Ok(SatResult::Sat(Model::new().with("x", 1))));
        assert_eq!(is_sat(&f("2*x == 3")), Ok(SatResult::Unsat));
    }

    #[test]
    fn models_are_verified() {
        let g = f("x + y <= 3 && x - y >= 1 && y >= 0 && 3*x + 2*y != 5");
        let m = is_sat(&g).unwrap().model().unwrap();
        assert_eq!(g.eval(&m), Ok(true));
    }

    #[test]
    fn entailment_examples() {
        let ctx = f("x > -1 && x < 2 && y == 0 && z == 1");
        assert!(entails(&ctx, &f("x > -4 && x < 5 && y < z + 33")));
        assert!(entails(&f("x <= 0"), &f("x <= 1")));
        assert!(!entails(&f("x <= 1"), &f("x <= 0")));
    }

    #[test]
    fn entailment_handles_equalities_and_disequalities() {
        assert!(entails(&f("x >= 2 && x <= 2"), &f("x == 2")));
        assert!(!entails(&f("x >= 2 && x <= 3"), &f("x == 2")));
        assert!(entails(&f("x >= 3"), &f("x != 2")));
        assert!(!entails(&f("x >= 2"), &f("x != 2")));
    }

    #[test]
    fn unsat_frame_entails_everything() {
        // the contradiction lives in a component unrelated to the goal
        assert!(entails(&f("y >= 1 && y <= 0"), &f("x == 5")));
        assert!(!Solver::default().entails_sat(&f("y == 0"), &f("x == 5")));
    }

    #[test]
    fn free_vars_after_canonicalisation() {
        assert_eq!(free_vars(&f("x + y <= 3")).len(), 2);
        assert!(free_vars(&Formula::truth()).is_empty());
        assert_eq!(free_vars(&f("0*x + y == 1")), [Var::new("y")].into_iter().collect());
    }

    #[test]
    fn eval_examples() {
        let m = Model::new().with("x", 1).with("y", 0);
        assert_eq!(eval_formula(&f("x < 2 && y == 0"), &m), Ok(true));
        let imp = BoolExpr::implies(f("x > 0").to_bool_expr(), f("y > 5").to_bool_expr());
        assert_eq!(eval_formula(&imp, &Model::new().with("x", 0).with("y", 0)), Ok(true));
        assert_eq!(eval_formula(&f("2*x + y <= 4"), &Model::new().with("x", 1).with("y", 3)), Ok(false));
        assert_eq!(
            eval_formula(&f("x < 2"), &Model::new()),
            Err(SolverError::UnboundVariable(Var::new("x")))
        );
    }

    #[test]
    fn solver_counts_decision_procedure_runs() {
        let s = Solver::default();
        s.is_sat(&f("x >= 0")).unwrap();
        s.is_sat(&Formula::truth()).unwrap();
        assert_eq!(s.calls(), 1);
    }
}
