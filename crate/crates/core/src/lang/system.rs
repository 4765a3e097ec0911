//! Transition systems ⟨points, start, →⟩ over basic statements.

use std::collections::BTreeSet;
use std::fmt;

use super::expr::{Expr, Var};
use crate::solver::LinAtom;

/// A syntactic location. Every iteration of a loop revisits the same points.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ProgramPoint(pub u32);

impl fmt::Display for ProgramPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Stmt {
    Assign(Var, Expr),
    Assume(LinAtom),
    Error,
    Halt,
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Assign(x, e) => write!(f, "{x} = {e}"),
            Stmt::Assume(a) => write!(f, "assume({a})"),
            Stmt::Error => f.write_str("error"),
            Stmt::Halt => f.write_str("halt"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Transition {
    pub from: ProgramPoint,
    pub to: ProgramPoint,
    pub stmt: Stmt,
    /// Closes a loop: `to` is a loop head and `from` lies inside its body.
    pub back_edge: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TransitionSystem {
    num_points: u32,
    start: ProgramPoint,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
    loop_heads: BTreeSet<ProgramPoint>,
}

impl TransitionSystem {
    /// Points are `0..num_points`. Outgoing transitions keep their order in
    /// `transitions`; the first one is the "then" side of a branch.
    pub fn new(
        num_points: u32,
        start: ProgramPoint,
        transitions: Vec<Transition>,
        loop_heads: BTreeSet<ProgramPoint>,
    ) -> Self {
        let mut outgoing = vec![Vec::new(); num_points as usize];
        for (i, t) in transitions.iter().enumerate() {
            outgoing[t.from.0 as usize].push(i);
        }
        TransitionSystem {
            num_points,
            start,
            transitions,
            outgoing,
            loop_heads,
        }
    }

    pub fn num_points(&self) -> u32 {
        self.num_points
    }

    pub fn points(&self) -> impl Iterator<Item = ProgramPoint> {
        (0..self.num_points).map(ProgramPoint)
    }

    pub fn start(&self) -> ProgramPoint {
        self.start
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, i: usize) -> &Transition {
        &self.transitions[i]
    }

    /// Indices of the transitions leaving `p`.
    pub fn outgoing(&self, p: ProgramPoint) -> &[usize] {
        &self.outgoing[p.0 as usize]
    }

    pub fn loop_heads(&self) -> &BTreeSet<ProgramPoint> {
        &self.loop_heads
    }

    /// Points whose single outgoing transition is `error`.
    pub fn error_points(&self) -> BTreeSet<ProgramPoint> {
        self.transitions
            .iter()
            .filter(|t| t.stmt == Stmt::Error)
            .map(|t| t.from)
            .collect()
    }

    /// Checks the structural invariants: endpoints exist, out-degree ≤ 2,
    /// and two-way branches are complementary assumes.
    pub fn validate(&self) -> Result<(), String> {
        if self.start.0 >= self.num_points {
            return Err(format!("start {} out of range", self.start));
        }
        for t in &self.transitions {
            if t.from.0 >= self.num_points || t.to.0 >= self.num_points {
                return Err(format!("transition {} -> {} out of range", t.from, t.to));
            }
        }
        for p in self.points() {
            match self.outgoing(p) {
                [] | [_] => {}
                [a, b] => match (&self.transitions[*a].stmt, &self.transitions[*b].stmt) {
                    (Stmt::Assume(x), Stmt::Assume(y)) if x.negate() == *y => {}
                    _ => return Err(format!("branch at {p} is not a complementary pair of assumes")),
                },
                _ => return Err(format!("{p} has more than two successors")),
            }
        }
        Ok(())
    }
}

impl fmt::Display for TransitionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.transitions {
            let back = if t.back_edge { " (back)" } else { "" };
            writeln!(f, "{} -> {}: {}{back}", t.from, t.to, t.stmt)?;
        }
        Ok(())
    }
}
