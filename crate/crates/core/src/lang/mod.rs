//! The toy imperative language: syntax, lowering and concrete execution.
//!
//! ```text
//! sym x in [0, 255]
//! var y = 0
//! if (x > 10 && x < 20) { y = y + 2*x } else { y = 1 }
//! assert(y != 31)
//! ```

mod ast;
mod exec;
mod expr;
mod lower;
mod parser;
mod system;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use ast::{Ast, AstStmt, Cond, SymDecl, VarDecl};
pub use exec::{execute_concrete, execute_traced, ConcreteOutcome, Store};
pub use expr::{Expr, Var};
pub use parser::parse_formula;
pub use system::{ProgramPoint, Stmt, Transition, TransitionSystem};

use crate::solver::Formula;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("syntax error on line {0}: {1}")]
    SyntaxError(usize, String),
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("non-linear expression at {0}")]
    NonLinearExpression(String),
    #[error("no input value for symbolic variable `{0}`")]
    MissingInput(String),
    #[error("integer overflow at {0}")]
    ArithmeticOverflow(ProgramPoint),
}

/// A parsed and lowered program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    ast: Ast,
    system: TransitionSystem,
    targets: BTreeSet<ProgramPoint>,
    safety: Formula,
}

impl Program {
    pub fn from_ast(ast: Ast) -> Result<Program, LangError> {
        let system = lower::lower(&ast)?;
        let targets = system.error_points();
        Ok(Program {
            ast,
            system,
            targets,
            safety: Formula::truth(),
        })
    }

    pub fn ast(&self) -> &Ast {
        &self.ast
    }

    pub fn symbolic_vars(&self) -> &[SymDecl] {
        &self.ast.syms
    }

    pub fn program_vars(&self) -> &[VarDecl] {
        &self.ast.vars
    }

    pub fn system(&self) -> &TransitionSystem {
        &self.system
    }

    /// Points carrying an `error` statement.
    pub fn targets(&self) -> &BTreeSet<ProgramPoint> {
        &self.targets
    }

    /// The property Φ every halting state must satisfy (`true` unless set).
    pub fn safety(&self) -> &Formula {
        &self.safety
    }

    pub fn with_safety(mut self, phi: Formula) -> Program {
        self.safety = phi;
        self
    }

    /// Re-lowers the program with a different initial value for `name`.
    pub fn with_initial(&self, name: &str, value: i64) -> Result<Program, LangError> {
        let mut ast = self.ast.clone();
        let decl = ast
            .vars
            .iter_mut()
            .find(|v| v.name.name() == name)
            .ok_or_else(|| LangError::UndeclaredVariable(name.to_string()))?;
        decl.init = value;
        Ok(Program::from_ast(ast)?.with_safety(self.safety.clone()))
    }

    pub fn pretty(&self) -> String {
        self.ast.pretty()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

pub fn parse_program(text: &str) -> Result<Program, LangError> {
    Program::from_ast(parser::parse_ast(text)?)
}

pub fn to_transition_system(program: &Program) -> TransitionSystem {
    program.system.clone()
}
