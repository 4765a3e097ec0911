//! Brute-force model enumeration over bounded integer boxes.
//!
//! Deliberately shares nothing with the elimination procedure so it can act
//! as an independent oracle.

use std::collections::BTreeMap;

use super::atom::{CanonRel, LinAtom};
use super::formula::{BoolExpr, Constraint, Model};
use super::SolverError;
use crate::lang::Var;

pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// A finite box `∏ [loᵢ, hiᵢ]` over named variables, in variable order.
#[derive(Clone, Debug)]
pub struct Domain {
    vars: Vec<Var>,
    ranges: Vec<(i64, i64)>,
}

/// A constraint compiled against a [`Domain`]'s variable indices.
#[derive(Clone, Debug)]
pub enum Compiled {
    True,
    False,
    Atom { terms: Vec<(usize, i64)>, rel: CanonRel, bound: i64 },
    Not(Box<Compiled>),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
}

impl Compiled {
    pub fn eval(&self, point: &[i64]) -> bool {
        match self {
            Compiled::True => true,
            Compiled::False => false,
            Compiled::Atom { terms, rel, bound } => {
                let value: i128 = terms.iter().map(|(i, c)| *c as i128 * point[*i] as i128).sum();
                let bound = *bound as i128;
                match rel {
                    CanonRel::Le => value <= bound,
                    CanonRel::Eq => value == bound,
                    CanonRel::Ne => value != bound,
                }
            }
            Compiled::Not(a) => !a.eval(point),
            Compiled::And(xs) => xs.iter().all(|x| x.eval(point)),
            Compiled::Or(xs) => xs.iter().any(|x| x.eval(point)),
        }
    }
}

impl Domain {
    pub fn new(bounds: &BTreeMap<Var, (i64, i64)>, cap: u64) -> Result<Self, SolverError> {
        let mut size: u128 = 1;
        for (lo, hi) in bounds.values() {
            size = size.saturating_mul(if hi < lo { 0 } else { (hi - lo) as u128 + 1 });
        }
        if size > cap as u128 {
            return Err(SolverError::DomainTooLarge { size, cap });
        }
        Ok(Domain {
            vars: bounds.keys().cloned().collect(),
            ranges: bounds.values().copied().collect(),
        })
    }

    /// Every variable in `vars` ranging over `[lo, hi]`.
    pub fn uniform<'a>(vars: impl IntoIterator<Item = &'a Var>, lo: i64, hi: i64) -> Result<Self, SolverError> {
        let bounds = vars.into_iter().map(|v| (v.clone(), (lo, hi))).collect();
        Domain::new(&bounds, DEFAULT_ENUMERATION_CAP)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn compile<C: Constraint>(&self, f: &C) -> Result<Compiled, SolverError> {
        self.compile_bool(&f.to_bool_expr())
    }

    fn compile_atom(&self, a: &LinAtom) -> Result<Compiled, SolverError> {
        if a.is_true() {
            return Ok(Compiled::True);
        }
        if a.is_false() {
            return Ok(Compiled::False);
        }
        let terms = a
            .lhs()
            .terms()
            .iter()
            .map(|(v, c)| match self.vars.binary_search(v) {
                Ok(i) => Ok((i, *c)),
                Err(_) => Err(SolverError::UnboundVariable(v.clone())),
            })
            .collect::<Result<_, _>>()?;
        Ok(Compiled::Atom {
            terms,
            rel: a.rel(),
            bound: a.bound(),
        })
    }

    fn compile_bool(&self, b: &BoolExpr) -> Result<Compiled, SolverError> {
        Ok(match b {
            BoolExpr::True => Compiled::True,
            BoolExpr::False => Compiled::False,
            BoolExpr::Atom(a) => self.compile_atom(a)?,
            BoolExpr::Not(a) => Compiled::Not(Box::new(self.compile_bool(a)?)),
            BoolExpr::And(xs) => Compiled::And(xs.iter().map(|x| self.compile_bool(x)).collect::<Result<_, _>>()?),
            BoolExpr::Or(xs) => Compiled::Or(xs.iter().map(|x| self.compile_bool(x)).collect::<Result<_, _>>()?),
            BoolExpr::Implies(a, c) => Compiled::Or(vec![
                Compiled::Not(Box::new(self.compile_bool(a)?)),
                self.compile_bool(c)?,
            ]),
        })
    }

    /// Visits every point in lexicographic order until `visit` returns false.
    /// Returns whether the walk ran to completion.
    pub fn for_each(&self, mut visit: impl FnMut(&[i64]) -> bool) -> bool {
        if self.ranges.iter().any(|(lo, hi)| hi < lo) {
            return true;
        }
        let mut point: Vec<i64> = self.ranges.iter().map(|(lo, _)| *lo).collect();
        loop {
            if !visit(&point) {
                return false;
            }
            let mut i = point.len();
            loop {
                if i == 0 {
                    return true;
                }
                i -= 1;
                if point[i] < self.ranges[i].1 {
                    point[i] += 1;
                    break;
                }
                point[i] = self.ranges[i].0;
            }
        }
    }

    pub fn model(&self, point: &[i64]) -> Model {
        self.vars.iter().cloned().zip(point.iter().copied()).collect()
    }

    /// All points satisfying `f`.
    pub fn models<C: Constraint>(&self, f: &C) -> Result<Vec<Model>, SolverError> {
        let c = self.compile(f)?;
        let mut out = Vec::new();
        self.for_each(|p| {
            if c.eval(p) {
                out.push(self.model(p));
            }
            true
        });
        Ok(out)
    }

    /// Every point satisfying `f` also satisfies `g`.
    pub fn entails<A: Constraint, B: Constraint>(&self, f: &A, g: &B) -> Result<bool, SolverError> {
        let (f, g) = (self.compile(f)?, self.compile(g)?);
        Ok(self.for_each(|p| !f.eval(p) || g.eval(p)))
    }

    /// `f` and `g` agree on every point.
    pub fn equivalent<A: Constraint, B: Constraint>(&self, f: &A, g: &B) -> Result<bool, SolverError> {
        let (f, g) = (self.compile(f)?, self.compile(g)?);
        Ok(self.for_each(|p| f.eval(p) == g.eval(p)))
    }

    pub fn any<C: Constraint>(&self, f: &C) -> Result<bool, SolverError> {
        let c = self.compile(f)?;
        Ok(!self.for_each(|p| !c.eval(p)))
    }
}

/// All assignments within `bounds` satisfying `f`, in lexicographic order
/// (variables by name, values ascending).
///
/// Every variable of `f` must be bounded; variables that are bounded but
/// absent from `f` still range over their interval.
pub fn enumerate_models<C: Constraint>(f: &C, bounds: &BTreeMap<Var, (i64, i64)>) -> Result<Vec<Model>, SolverError> {
    Domain::new(bounds, DEFAULT_ENUMERATION_CAP)?.models(f)
}
