//! Conjunctive formulas, models and the disjunctive `BoolExpr` used by oracles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::atom::LinAtom;
use super::SolverError;
use crate::lang::{Expr, Var};

/// An integer assignment to variables.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Model(BTreeMap<Var, i64>);

impl Model {
    pub fn new() -> Self {
        Model::default()
    }

    pub fn get(&self, v: &Var) -> Option<i64> {
        self.0.get(v).copied()
    }

    pub fn set(&mut self, v: Var, value: i64) {
        self.0.insert(v, value);
    }

    pub fn with(mut self, v: impl Into<Var>, value: i64) -> Self {
        self.set(v.into(), value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, i64)> {
        self.0.iter().map(|(v, x)| (v, *x))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, e: &Expr) -> Result<i64, SolverError> {
        e.eval_with(|v| self.get(v))
            .map_err(|v| SolverError::UnboundVariable(v.clone()))
    }
}

impl FromIterator<(Var, i64)> for Model {
    fn from_iter<I: IntoIterator<Item = (Var, i64)>>(iter: I) -> Self {
        Model(iter.into_iter().collect())
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, x)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}: {x}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A conjunction of canonical atoms, kept in insertion (path) order.
///
/// The empty conjunction is `true`. Trivially true atoms are never stored and
/// duplicates keep their first position.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Formula {
    atoms: Vec<LinAtom>,
}

impl Formula {
    pub fn truth() -> Self {
        Formula::default()
    }

    pub fn falsity() -> Self {
        Formula {
            atoms: vec![LinAtom::falsity()],
        }
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = LinAtom>) -> Self {
        let mut f = Formula::truth();
        for a in atoms {
            f.push(a);
        }
        f
    }

    pub fn atom(a: LinAtom) -> Self {
        Formula::from_atoms([a])
    }

    pub fn push(&mut self, a: LinAtom) {
        if a.is_true() || self.atoms.contains(&a) {
            return;
        }
        self.atoms.push(a);
    }

    pub fn atoms(&self) -> &[LinAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn has_false_atom(&self) -> bool {
        self.atoms.iter().any(LinAtom::is_false)
    }

    /// `self ∧ other`, atoms of `other` appended after those of `self`.
    pub fn and(&self, other: &Formula) -> Formula {
        let mut out = self.clone();
        for a in &other.atoms {
            out.push(a.clone());
        }
        out
    }

    pub fn with(&self, a: LinAtom) -> Formula {
        let mut out = self.clone();
        out.push(a);
        out
    }

    pub fn without_index(&self, i: usize) -> Formula {
        let mut atoms = self.atoms.clone();
        atoms.remove(i);
        Formula { atoms }
    }

    /// Conjunction that also drops inequalities made redundant by a tighter
    /// bound on the same linear term. Semantics are unchanged.
    pub fn and_tight(&self, other: &Formula) -> Formula {
        let mut out = self.clone();
        for a in &other.atoms {
            out.push_tight(a.clone());
        }
        out
    }

    fn push_tight(&mut self, a: LinAtom) {
        use super::atom::CanonRel;
        if a.rel() == CanonRel::Le {
            for b in self.atoms.iter_mut() {
                if b.rel() == CanonRel::Le && b.lhs() == a.lhs() {
                    if a.bound() < b.bound() {
                        *b = a;
                    }
                    return;
                }
            }
        }
        self.push(a);
    }

    pub fn substitute(&self, v: &Var, e: &Expr) -> Formula {
        Formula::from_atoms(self.atoms.iter().map(|a| a.substitute(v, e)))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        self.atoms.iter().flat_map(|a| a.free_vars()).collect()
    }

    pub fn eval(&self, m: &Model) -> Result<bool, SolverError> {
        for a in &self.atoms {
            if !a
                .eval_with(|v| m.get(v))
                .map_err(|v| SolverError::UnboundVariable(v.clone()))?
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_bool_expr(&self) -> BoolExpr {
        BoolExpr::And(self.atoms.iter().cloned().map(BoolExpr::Atom).collect())
    }
}

impl FromIterator<LinAtom> for Formula {
    fn from_iter<I: IntoIterator<Item = LinAtom>>(iter: I) -> Self {
        Formula::from_atoms(iter)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("true");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" && ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Arbitrary boolean combination of atoms. Only the path-based weakest
/// precondition oracle and the brute-force evaluator work with these.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    True,
    False,
    Atom(LinAtom),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
    Implies(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn implies(a: BoolExpr, b: BoolExpr) -> BoolExpr {
        BoolExpr::Implies(Box::new(a), Box::new(b))
    }

    pub fn not(a: BoolExpr) -> BoolExpr {
        BoolExpr::Not(Box::new(a))
    }

    pub fn substitute(&self, v: &Var, e: &Expr) -> BoolExpr {
        match self {
            BoolExpr::True | BoolExpr::False => self.clone(),
            BoolExpr::Atom(a) => BoolExpr::Atom(a.substitute(v, e)),
            BoolExpr::Not(a) => BoolExpr::not(a.substitute(v, e)),
            BoolExpr::And(xs) => BoolExpr::And(xs.iter().map(|x| x.substitute(v, e)).collect()),
            BoolExpr::Or(xs) => BoolExpr::Or(xs.iter().map(|x| x.substitute(v, e)).collect()),
            BoolExpr::Implies(a, b) => BoolExpr::implies(a.substitute(v, e), b.substitute(v, e)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            BoolExpr::True | BoolExpr::False => {}
            BoolExpr::Atom(a) => out.extend(a.free_vars()),
            BoolExpr::Not(a) => a.collect_vars(out),
            BoolExpr::And(xs) | BoolExpr::Or(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            BoolExpr::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn eval(&self, m: &Model) -> Result<bool, SolverError> {
        Ok(match self {
            BoolExpr::True => true,
            BoolExpr::False => false,
            BoolExpr::Atom(a) => a
                .eval_with(|v| m.get(v))
                .map_err(|v| SolverError::UnboundVariable(v.clone()))?,
            BoolExpr::Not(a) => !a.eval(m)?,
            BoolExpr::And(xs) => {
                for x in xs {
                    if !x.eval(m)? {
                        return Ok(false);
                    }
                }
                true
            }
            BoolExpr::Or(xs) => {
                for x in xs {
                    if x.eval(m)? {
                        return Ok(true);
                    }
                }
                false
            }
            BoolExpr::Implies(a, b) => !a.eval(m)? || b.eval(m)?,
        })
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, xs: &[BoolExpr], op: &str, empty: &str) -> fmt::Result {
            if xs.is_empty() {
                return f.write_str(empty);
            }
            f.write_str("(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        }
        match self {
            BoolExpr::True => f.write_str("true"),
            BoolExpr::False => f.write_str("false"),
            BoolExpr::Atom(a) => write!(f, "{a}"),
            BoolExpr::Not(a) => write!(f, "!({a})"),
            BoolExpr::And(xs) => join(f, xs, "&&", "true"),
            BoolExpr::Or(xs) => join(f, xs, "||", "false"),
            BoolExpr::Implies(a, b) => write!(f, "({a} -> {b})"),
        }
    }
}

impl fmt::Debug for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Common surface of formulas the solver can evaluate and rewrite.
pub trait Constraint: Clone {
    fn free_vars(&self) -> BTreeSet<Var>;
    fn substitute(&self, v: &Var, e: &Expr) -> Self;
    fn eval(&self, m: &Model) -> Result<bool, SolverError>;
    fn to_bool_expr(&self) -> BoolExpr;
}

impl Constraint for Formula {
    fn free_vars(&self) -> BTreeSet<Var> {
        Formula::free_vars(self)
    }
    fn substitute(&self, v: &Var, e: &Expr) -> Self {
        Formula::substitute(self, v, e)
    }
    fn eval(&self, m: &Model) -> Result<bool, SolverError> {
        Formula::eval(self, m)
    }
    fn to_bool_expr(&self) -> BoolExpr {
        Formula::to_bool_expr(self)
    }
}

impl Constraint for BoolExpr {
    fn free_vars(&self) -> BTreeSet<Var> {
        BoolExpr::free_vars(self)
    }
    fn substitute(&self, v: &Var, e: &Expr) -> Self {
        BoolExpr::substitute(self, v, e)
    }
    fn eval(&self, m: &Model) -> Result<bool, SolverError> {
        BoolExpr::eval(self, m)
    }
    fn to_bool_expr(&self) -> BoolExpr {
        self.clone()
    }
}

impl Constraint for LinAtom {
    fn free_vars(&self) -> BTreeSet<Var> {
        LinAtom::free_vars(self)
    }
    fn substitute(&self, v: &Var, e: &Expr) -> Self {
        LinAtom::substitute(self, v, e)
    }
    fn eval(&self, m: &Model) -> Result<bool, SolverError> {
        self.eval_with(|v| m.get(v))
            .map_err(|v| SolverError::UnboundVariable(v.clone()))
    }
    fn to_bool_expr(&self) -> BoolExpr {
        BoolExpr::Atom(self.clone())
    }
}
