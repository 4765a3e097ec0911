//! Interpolants: conjunctive back-propagation over single statements,
//! abduction, and the disjunctive path-based weakest precondition used as a
//! test oracle.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::lang::{Stmt, Var};
use crate::solver::{BoolExpr, Formula, LinAtom, Solver};

/// A conjunctive abstraction of a state that keeps its subtree safe.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Interpolant {
    formula: Formula,
}

impl Interpolant {
    pub fn new(formula: Formula) -> Self {
        Interpolant { formula }
    }

    pub fn truth() -> Self {
        Interpolant::default()
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn into_formula(self) -> Formula {
        self.formula
    }

    pub fn and(&self, other: &Interpolant) -> Interpolant {
        Interpolant::new(self.formula.and_tight(&other.formula))
    }
}

impl From<Formula> for Interpolant {
    fn from(f: Formula) -> Self {
        Interpolant::new(f)
    }
}

impl fmt::Display for Interpolant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula)
    }
}

impl fmt::Debug for Interpolant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula)
    }
}

/// What a child hands back to its parent: an interpolant, or the marker for
/// an infeasible child.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Post {
    False,
    Intp(Interpolant),
}

#[derive(Clone, Debug)]
pub struct PropagationInput {
    /// ⟦s⟧ of the parent state.
    pub context: Formula,
    /// `None` is the empty statement.
    pub stmt: Option<Stmt>,
    pub post: Post,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// Which back-propagation rule produced an interpolant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Empty,
    Assign,
    Infeasible,
    Entailed,
    Abduction,
}

/// Interpolation bound to one solver handle.
#[derive(Clone, Copy)]
pub struct Interpolator<'a> {
    solver: &'a Solver,
    check_contracts: bool,
}

impl<'a> Interpolator<'a> {
    pub fn new(solver: &'a Solver) -> Self {
        Interpolator {
            solver,
            check_contracts: false,
        }
    }

    /// Re-checks the entailment preconditions of abduction and core with
    /// extra solver calls.
    pub fn checking_contracts(mut self, on: bool) -> Self {
        self.check_contracts = on;
        self
    }

    pub fn backprop(&self, input: &PropagationInput) -> Result<Interpolant, InterpError> {
        self.backprop_rule(input).map(|(r, _)| r)
    }

    pub fn backprop_rule(&self, input: &PropagationInput) -> Result<(Interpolant, Rule), InterpError> {
        Ok(match (&input.stmt, &input.post) {
            (Some(Stmt::Assume(e)), Post::False) => (Interpolant::new(Formula::atom(e.negate())), Rule::Infeasible),
            (_, Post::False) => (Interpolant::new(Formula::falsity()), Rule::Infeasible),
            (None | Some(Stmt::Error | Stmt::Halt), Post::Intp(psi)) => (psi.clone(), Rule::Empty),
            (Some(Stmt::Assign(x, e)), Post::Intp(psi)) => {
                (Interpolant::new(psi.formula().substitute(x, e)), Rule::Assign)
            }
            (Some(Stmt::Assume(e)), Post::Intp(psi)) => {
                if e.is_true() || self.solver.entails(&input.context, &Formula::atom(e.clone())) {
                    (Interpolant::new(psi.formula().with(e.clone())), Rule::Entailed)
                } else {
                    (self.abduction(&input.context, e, psi.formula())?, Rule::Abduction)
                }
            }
        })
    }

    /// Finds `R` with `phi ⊨ R` and `R ∧ e ⊨ psi`, given `phi ∧ e ⊨ psi`.
    pub fn abduction(&self, phi: &Formula, e: &LinAtom, psi: &Formula) -> Result<Interpolant, InterpError> {
        let gamma = Formula::atom(e.clone()).and(phi);
        if matches!(self.solver.is_sat(&gamma), Ok(r) if !r.is_sat()) {
            return Ok(Interpolant::new(Formula::atom(e.negate())));
        }
        if self.check_contracts && !self.solver.entails(&gamma, psi) {
            return Err(InterpError::PreconditionViolated(format!(
                "{phi} together with {e} does not entail {psi}"
            )));
        }
        let phi_bar = self.core(&gamma, psi)?;
        let mut v = e.free_vars();
        let (phi_v, psi_v, psi_vbar) = loop {
            let (phi_v, _) = separate(&phi_bar, &v);
            let mut v2 = v.clone();
            v2.extend(phi_v.free_vars());
            let (psi_v, psi_vbar) = separate(psi, &v2);
            let mut next = v2;
            next.extend(psi_v.free_vars());
            if next == v {
                break (phi_v, psi_v, psi_vbar);
            }
            v = next;
        };
        if psi_v.is_true() {
            return Ok(Interpolant::new(psi_vbar));
        }
        let phi_v: Formula = phi_v.atoms().iter().filter(|a| *a != e).cloned().collect();
        Ok(Interpolant::new(phi_v.and(&psi_vbar)))
    }

    /// Deletion-based minimisation: scans `gamma` front to back and drops
    /// every atom whose removal keeps `psi` entailed.
    pub fn core(&self, gamma: &Formula, psi: &Formula) -> Result<Formula, InterpError> {
        if self.check_contracts && !self.solver.entails(gamma, psi) {
            return Err(InterpError::PreconditionViolated(format!("{gamma} does not entail {psi}")));
        }
        let mut current = gamma.clone();
        let mut i = 0;
        while i < current.len() {
            let candidate = current.without_index(i);
            if self.solver.entails(&candidate, psi) {
                current = candidate;
            } else {
                i += 1;
            }
        }
        Ok(current)
    }
}

/// Splits `gamma` into the atoms variable-connected to `v` and the rest.
/// Both parts keep the relative order of `gamma`.
pub fn separate(gamma: &Formula, v: &BTreeSet<Var>) -> (Formula, Formula) {
    let mut v = v.clone();
    let mut inside = vec![false; gamma.len()];
    loop {
        let before = v.len();
        for (i, a) in gamma.atoms().iter().enumerate() {
            if !inside[i] && a.lhs().terms().iter().any(|(x, _)| v.contains(x)) {
                inside[i] = true;
                v.extend(a.free_vars());
            }
        }
        if v.len() == before {
            break;
        }
    }
    let mut gv = Formula::truth();
    let mut gvbar = Formula::truth();
    for (a, inside) in gamma.atoms().iter().zip(inside) {
        if inside {
            gv.push(a.clone());
        } else {
            gvbar.push(a.clone());
        }
    }
    (gv, gvbar)
}

pub fn backprop(input: &PropagationInput) -> Result<Interpolant, InterpError> {
    let solver = Solver::default();
    Interpolator::new(&solver)
        .checking_contracts(cfg!(debug_assertions))
        .backprop(input)
}

pub fn abduction(phi: &Formula, e: &LinAtom, psi: &Formula) -> Result<Interpolant, InterpError> {
    let solver = Solver::default();
    Interpolator::new(&solver)
        .checking_contracts(cfg!(debug_assertions))
        .abduction(phi, e, psi)
}

pub fn core(gamma: &Formula, psi: &Formula) -> Result<Formula, InterpError> {
    let solver = Solver::default();
    Interpolator::new(&solver)
        .checking_contracts(cfg!(debug_assertions))
        .core(gamma, psi)
}

/// Weakest precondition of `post` along a straight-line path. Only used as
/// an oracle: the result is disjunctive in general.
pub fn path_wp(path: &[Stmt], post: &BoolExpr) -> BoolExpr {
    path.iter().rev().fold(post.clone(), |post, stmt| match stmt {
        Stmt::Assign(x, e) => post.substitute(x, e),
        Stmt::Assume(e) if post == BoolExpr::False => BoolExpr::Atom(e.negate()),
        Stmt::Assume(e) => BoolExpr::implies(BoolExpr::Atom(e.clone()), post),
        Stmt::Error | Stmt::Halt => post,
    })
}
