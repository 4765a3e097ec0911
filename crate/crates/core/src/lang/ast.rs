//! Surface syntax tree and its pretty-printer.

use std::fmt::{self, Write};

use super::expr::{Expr, Var};
use crate::solver::Rel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    Atom(Expr, Rel, Expr),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

impl Cond {
    pub fn not(c: Cond) -> Cond {
        Cond::Not(Box::new(c))
    }

    pub fn and(a: Cond, b: Cond) -> Cond {
        Cond::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Cond, b: Cond) -> Cond {
        Cond::Or(Box::new(a), Box::new(b))
    }

    pub(crate) fn for_each_expr<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        match self {
            Cond::Atom(l, _, r) => {
                f(l);
                f(r);
            }
            Cond::Not(c) => c.for_each_expr(f),
            Cond::And(a, b) | Cond::Or(a, b) => {
                a.for_each_expr(f);
                b.for_each_expr(f);
            }
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::Atom(l, r, rhs) => write!(f, "{l} {} {rhs}", r.symbol()),
            Cond::Not(c) => write!(f, "!({c})"),
            Cond::And(a, b) => write!(f, "({a}) && ({b})"),
            Cond::Or(a, b) => write!(f, "({a}) || ({b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AstStmt {
    Assign { var: Var, value: Expr, line: usize },
    /// Conjunction of atoms.
    Assume(Vec<(Expr, Rel, Expr)>),
    If { cond: Cond, then: Vec<AstStmt>, els: Vec<AstStmt> },
    While { cond: Cond, body: Vec<AstStmt> },
    Assert(Cond),
    Error,
    Halt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymDecl {
    pub name: Var,
    pub bounds: Option<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: Var,
    pub init: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ast {
    pub syms: Vec<SymDecl>,
    pub vars: Vec<VarDecl>,
    pub body: Vec<AstStmt>,
}

impl Ast {
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        for s in &self.syms {
            match s.bounds {
                Some((lo, hi)) => writeln!(out, "sym {} in [{lo}, {hi}]", s.name),
                None => writeln!(out, "sym {}", s.name),
            }
            .unwrap();
        }
        for v in &self.vars {
            writeln!(out, "var {} = {}", v.name, v.init).unwrap();
        }
        print_block(&mut out, &self.body, 0);
        out
    }
}

fn print_block(out: &mut String, stmts: &[AstStmt], indent: usize) {
    let pad = "    ".repeat(indent);
    for s in stmts {
        match s {
            AstStmt::Assign { var, value, .. } => writeln!(out, "{pad}{var} = {value}").unwrap(),
            AstStmt::Assume(atoms) => {
                let parts: Vec<String> = atoms
                    .iter()
                    .map(|(l, r, rhs)| format!("{l} {} {rhs}", r.symbol()))
                    .collect();
                writeln!(out, "{pad}assume({})", parts.join(" && ")).unwrap();
            }
            AstStmt::If { cond, then, els } => {
                writeln!(out, "{pad}if ({cond}) {{").unwrap();
                print_block(out, then, indent + 1);
                if els.is_empty() {
                    writeln!(out, "{pad}}}").unwrap();
                } else {
                    writeln!(out, "{pad}}} else {{").unwrap();
                    print_block(out, els, indent + 1);
                    writeln!(out, "{pad}}}").unwrap();
                }
            }
            AstStmt::While { cond, body } => {
                writeln!(out, "{pad}while ({cond}) {{").unwrap();
                print_block(out, body, indent + 1);
                writeln!(out, "{pad}}}").unwrap();
            }
            AstStmt::Assert(cond) => writeln!(out, "{pad}assert({cond})").unwrap(),
            AstStmt::Error => writeln!(out, "{pad}error").unwrap(),
            AstStmt::Halt => writeln!(out, "{pad}halt").unwrap(),
        }
    }
}
