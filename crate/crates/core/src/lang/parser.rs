//! Lexer and recursive-descent parser for program text and formula fixtures.

use super::ast::{Ast, AstStmt, Cond, SymDecl, VarDecl};
use super::expr::{Expr, Var};
use super::LangError;
use crate::solver::{Formula, LinAtom, Rel};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Assign,
    Rel(Rel),
    Plus,
    Minus,
    Star,
    AndAnd,
    OrOr,
    Bang,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(k) => format!("`{k}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Assign => "`=`".into(),
            Tok::Rel(r) => format!("`{}`", r.symbol()),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::AndAnd => "`&&`".into(),
            Tok::OrOr => "`||`".into(),
            Tok::Bang => "`!`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, LangError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '/' if next == Some('/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let k = s
                    .parse::<i64>()
                    .map_err(|_| LangError::SyntaxError(line, format!("integer literal {s} is out of range")))?;
                out.push((Tok::Int(k), line));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), line));
            }
            _ => {
                let two = |t: Tok| (t, 2);
                let (tok, len) = match (c, next) {
                    ('=', Some('=')) => two(Tok::Rel(Rel::Eq)),
                    ('!', Some('=')) => two(Tok::Rel(Rel::Ne)),
                    ('<', Some('=')) => two(Tok::Rel(Rel::Le)),
                    ('>', Some('=')) => two(Tok::Rel(Rel::Ge)),
                    ('&', Some('&')) => two(Tok::AndAnd),
                    ('|', Some('|')) => two(Tok::OrOr),
                    ('<', _) => (Tok::Rel(Rel::Lt), 1),
                    ('>', _) => (Tok::Rel(Rel::Gt), 1),
                    ('=', _) => (Tok::Assign, 1),
                    ('!', _) => (Tok::Bang, 1),
                    ('(', _) => (Tok::LParen, 1),
                    (')', _) => (Tok::RParen, 1),
                    ('{', _) => (Tok::LBrace, 1),
                    ('}', _) => (Tok::RBrace, 1),
                    ('[', _) => (Tok::LBracket, 1),
                    (']', _) => (Tok::RBracket, 1),
                    (',', _) => (Tok::Comma, 1),
                    (';', _) => (Tok::Semi, 1),
                    ('+', _) => (Tok::Plus, 1),
                    ('-', _) => (Tok::Minus, 1),
                    ('*', _) => (Tok::Star, 1),
                    _ => return Err(LangError::SyntaxError(line, format!("unexpected character `{c}`"))),
                };
                out.push((tok, line));
                i += len;
            }
        }
    }
    Ok(out)
}

const KEYWORDS: &[&str] = &[
    "sym", "var", "in", "if", "else", "while", "error", "halt", "assert", "assume", "true",
];

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

type PResult<T> = Result<T, LangError>;

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or(1, |(_, l)| *l)
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(LangError::SyntaxError(self.line(), msg.into()))
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.unexpected(&t.describe())
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<Var> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let v = Var::new(s);
                self.pos += 1;
                Ok(v)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat(&Tok::Minus);
        match self.peek() {
            Some(Tok::Int(k)) => {
                let k = *k;
                self.pos += 1;
                Ok(if neg { -k } else { k })
            }
            _ => self.unexpected("an integer"),
        }
    }

    fn program(&mut self) -> PResult<Ast> {
        let mut ast = Ast::default();
        while self.peek().is_some() {
            if self.eat(&Tok::Semi) {
                continue;
            }
            if self.is_keyword("sym") || self.is_keyword("var") {
                let declared = ast.syms.iter().map(|s| &s.name).chain(ast.vars.iter().map(|v| &v.name));
                if let Some(Tok::Ident(name)) = self.toks.get(self.pos + 1).map(|(t, _)| t) {
                    if declared.into_iter().any(|d| d.name() == name) {
                        self.pos += 1;
                        return self.error(format!("`{name}` is declared twice"));
                    }
                }
            }
            if self.eat_keyword("sym") {
                let name = self.ident()?;
                let bounds = if self.eat_keyword("in") {
                    self.expect(Tok::LBracket)?;
                    let lo = self.int()?;
                    self.expect(Tok::Comma)?;
                    let hi = self.int()?;
                    self.expect(Tok::RBracket)?;
                    if lo > hi {
                        return self.error(format!("empty range [{lo}, {hi}] for `{name}`"));
                    }
                    Some((lo, hi))
                } else {
                    None
                };
                ast.syms.push(SymDecl { name, bounds });
            } else if self.eat_keyword("var") {
                let name = self.ident()?;
                self.expect(Tok::Assign)?;
                let init = self.int()?;
                ast.vars.push(VarDecl { name, init });
            } else {
                let s = self.stmt()?;
                ast.body.push(s);
            }
        }
        Ok(ast)
    }

    fn block(&mut self) -> PResult<Vec<AstStmt>> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        loop {
            if self.eat(&Tok::RBrace) {
                return Ok(out);
            }
            if self.eat(&Tok::Semi) {
                continue;
            }
            if self.peek().is_none() {
                return self.unexpected("`}`");
            }
            if self.is_keyword("sym") || self.is_keyword("var") {
                return self.error("declarations are only allowed at the top level");
            }
            out.push(self.stmt()?);
        }
    }

    fn paren_cond(&mut self) -> PResult<Cond> {
        self.expect(Tok::LParen)?;
        let c = self.cond()?;
        self.expect(Tok::RParen)?;
        Ok(c)
    }

    fn stmt(&mut self) -> PResult<AstStmt> {
        if self.eat_keyword("if") {
            let cond = self.paren_cond()?;
            let then = self.block()?;
            let els = if self.eat_keyword("else") {
                if self.is_keyword("if") {
                    vec![self.stmt()?]
                } else {
                    self.block()?
                }
            } else {
                Vec::new()
            };
            return Ok(AstStmt::If { cond, then, els });
        }
        if self.eat_keyword("while") {
            let cond = self.paren_cond()?;
            let body = self.block()?;
            return Ok(AstStmt::While { cond, body });
        }
        if self.eat_keyword("assert") {
            return Ok(AstStmt::Assert(self.paren_cond()?));
        }
        if self.eat_keyword("assume") {
            let line = self.line();
            let cond = self.paren_cond()?;
            let mut atoms = Vec::new();
            if !flatten_conjunction(&cond, &mut atoms) {
                return Err(LangError::SyntaxError(line, "assume takes a conjunction of atoms".into()));
            }
            return Ok(AstStmt::Assume(atoms));
        }
        if self.eat_keyword("error") {
            return Ok(AstStmt::Error);
        }
        if self.eat_keyword("halt") {
            return Ok(AstStmt::Halt);
        }
        let line = self.line();
        let var = self.ident()?;
        self.expect(Tok::Assign)?;
        let value = self.expr()?;
        Ok(AstStmt::Assign { var, value, line })
    }

    fn cond(&mut self) -> PResult<Cond> {
        let mut c = self.conj()?;
        while self.eat(&Tok::OrOr) {
            c = Cond::or(c, self.conj()?);
        }
        Ok(c)
    }

    fn conj(&mut self) -> PResult<Cond> {
        let mut c = self.unary_cond()?;
        while self.eat(&Tok::AndAnd) {
            c = Cond::and(c, self.unary_cond()?);
        }
        Ok(c)
    }

    fn unary_cond(&mut self) -> PResult<Cond> {
        if self.eat(&Tok::Bang) {
            return Ok(Cond::not(self.unary_cond()?));
        }
        if self.peek() == Some(&Tok::LParen) {
            // `(` opens either a nested condition or a parenthesised operand.
            let save = self.pos;
            self.pos += 1;
            if let Ok(c) = self.cond() {
                if self.eat(&Tok::RParen) && !self.at_operator() {
                    return Ok(c);
                }
            }
            self.pos = save;
        }
        self.atom()
    }

    fn at_operator(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Rel(_) | Tok::Plus | Tok::Minus | Tok::Star)
        )
    }

    fn atom(&mut self) -> PResult<Cond> {
        let lhs = self.expr()?;
        let rel = match self.peek() {
            Some(Tok::Rel(r)) => *r,
            _ => return self.unexpected("a comparison operator"),
        };
        self.pos += 1;
        let rhs = self.expr()?;
        Ok(Cond::Atom(lhs, rel, rhs))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                e = e.add(&self.term()?);
            } else if self.eat(&Tok::Minus) {
                e = e.sub(&self.term()?);
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let line = self.line();
        let mut e = self.factor()?;
        while self.eat(&Tok::Star) {
            let rhs = self.factor()?;
            e = if rhs.is_constant() {
                e.scale(rhs.constant_part())
            } else if e.is_constant() {
                rhs.scale(e.constant_part())
            } else {
                return Err(LangError::NonLinearExpression(format!("line {line}: ({e}) * ({rhs})")));
            };
        }
        Ok(e)
    }

    fn factor(&mut self) -> PResult<Expr> {
        match self.peek() {
            Some(Tok::Int(k)) => {
                let k = *k;
                self.pos += 1;
                Ok(Expr::constant(k))
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Ok(Expr::var(self.ident()?)),
        }
    }
}

fn flatten_conjunction(c: &Cond, out: &mut Vec<(Expr, Rel, Expr)>) -> bool {
    match c {
        Cond::Atom(l, r, rhs) => {
            out.push((l.clone(), *r, rhs.clone()));
            true
        }
        Cond::And(a, b) => flatten_conjunction(a, out) && flatten_conjunction(b, out),
        _ => false,
    }
}

pub(crate) fn parse_ast(text: &str) -> Result<Ast, LangError> {
    Parser::new(text)?.program()
}

/// Parses a conjunction of atoms such as `x > -1 && x < 2 && y == 0`.
/// `true` denotes the empty conjunction. Variables are not checked.
pub fn parse_formula(text: &str) -> Result<Formula, LangError> {
    let mut p = Parser::new(text)?;
    if p.eat_keyword("true") {
        if p.peek().is_some() {
            return p.unexpected("end of input");
        }
        return Ok(Formula::truth());
    }
    let c = p.cond()?;
    if p.peek().is_some() {
        return p.unexpected("end of input");
    }
    let mut atoms = Vec::new();
    if !flatten_conjunction(&c, &mut atoms) {
        return Err(LangError::SyntaxError(1, "formulas are conjunctions of atoms".into()));
    }
    Ok(atoms.iter().map(|(l, r, rhs)| LinAtom::new(l, *r, rhs)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_comments_and_crlf() {
        let toks = lex("x = 1 // note\r\ny = 2").unwrap();
        assert_eq!(toks.len(), 6);
        assert_eq!(toks[5].1, 2);
    }

    #[test]
    fn products_need_a_constant_side() {
        let mut p = Parser::new("2 * x + x * 3 - (y - 1) * -1").unwrap();
        let e = p.expr().unwrap();
        assert_eq!(e, Expr::from_terms([(Var::new("x"), 5), (Var::new("y"), 1)], -1));
        let err = Parser::new("x * x").unwrap().expr().unwrap_err();
        assert!(matches!(err, LangError::NonLinearExpression(_)));
    }

    #[test]
    fn parenthesised_operands_and_conditions() {
        let c = Parser::new("(x + 1) > 0").unwrap().cond().unwrap();
        assert!(matches!(c, Cond::Atom(..)));
        let c = Parser::new("(x > 0) && !(y < 1 || y > 3)").unwrap().cond().unwrap();
        assert!(matches!(c, Cond::And(..)));
    }

    #[test]
    fn formula_fixtures() {
        let f = parse_formula("x > -1 && x < 2 && y == 0").unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(parse_formula("true").unwrap(), Formula::truth());
        assert!(parse_formula("x > 0 || y > 0").is_err());
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let err = parse_ast("sym x\nif (x > ) { error }").unwrap_err();
        assert!(matches!(err, LangError::SyntaxError(2, _)), "{err:?}");
    }
}
