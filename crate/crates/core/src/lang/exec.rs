//! Concrete interpretation, used to replay witnesses.

use std::collections::BTreeMap;

use super::expr::Var;
use super::system::{ProgramPoint, Stmt};
use super::{LangError, Program};
use crate::solver::Model;

pub type Store = BTreeMap<Var, i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConcreteOutcome {
    /// Reached the `error` statement at `point`.
    HitError { point: ProgramPoint, store: Store },
    HitHalt { store: Store },
    BudgetExhausted,
    /// No outgoing assume holds at `point`; only possible for explicit
    /// `assume` statements and declared input ranges.
    Blocked { point: ProgramPoint },
}

impl ConcreteOutcome {
    pub fn is_error(&self) -> bool {
        matches!(self, ConcreteOutcome::HitError { .. })
    }
}

/// Runs `program` on `input`, taking at most `step_budget` transitions.
pub fn execute_concrete(program: &Program, input: &Model, step_budget: u64) -> Result<ConcreteOutcome, LangError> {
    execute_traced(program, input, step_budget).map(|(o, _)| o)
}

/// Like [`execute_concrete`], also returning the indices of the
/// transitions taken.
pub fn execute_traced(
    program: &Program,
    input: &Model,
    step_budget: u64,
) -> Result<(ConcreteOutcome, Vec<usize>), LangError> {
    let ts = program.system();
    let mut store = Store::new();
    for s in program.symbolic_vars() {
        let x = input
            .get(&s.name)
            .ok_or_else(|| LangError::MissingInput(s.name.to_string()))?;
        store.insert(s.name.clone(), x);
    }
    for v in program.program_vars() {
        store.insert(v.name.clone(), v.init);
    }
    let mut trace = Vec::new();
    let mut point = ts.start();
    let lookup = |store: &Store, v: &Var| store.get(v).copied();
    loop {
        if trace.len() as u64 >= step_budget {
            return Ok((ConcreteOutcome::BudgetExhausted, trace));
        }
        let mut taken = None;
        for &i in ts.outgoing(point) {
            let t = ts.transition(i);
            let enabled = match &t.stmt {
                Stmt::Assume(a) => a
                    .eval_with(|v| lookup(&store, v))
                    .map_err(|v| LangError::UndeclaredVariable(v.to_string()))?,
                _ => true,
            };
            if enabled {
                taken = Some(i);
                break;
            }
        }
        let Some(i) = taken else {
            if ts.outgoing(point).is_empty() {
                // a dangling point behaves like an implicit halt
                return Ok((ConcreteOutcome::HitHalt { store }, trace));
            }
            return Ok((ConcreteOutcome::Blocked { point }, trace));
        };
        trace.push(i);
        let t = ts.transition(i);
        match &t.stmt {
            Stmt::Assign(x, e) => {
                let value = e
                    .terms()
                    .iter()
                    .try_fold(e.constant_part(), |acc, (v, c)| {
                        let x = lookup(&store, v)?;
                        c.checked_mul(x).and_then(|p| p.checked_add(acc))
                    })
                    .ok_or(LangError::ArithmeticOverflow(point))?;
                store.insert(x.clone(), value);
            }
            Stmt::Assume(_) => {}
            Stmt::Error => return Ok((ConcreteOutcome::HitError { point, store }, trace)),
            Stmt::Halt => return Ok((ConcreteOutcome::HitHalt { store }, trace)),
        }
        point = t.to;
    }
}
