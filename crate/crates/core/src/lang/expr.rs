//! Variables and linear integer expressions.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// A program or symbolic variable name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(name: &str) -> Self {
        Var::new(name)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn checked(v: Option<i64>) -> i64 {
    // Coefficients are user-scale integers; reaching the i64 limit means the
    // input is far outside anything this engine is meant to handle.
    v.expect("integer overflow in linear arithmetic")
}

/// `Σ cᵢ·vᵢ + k` with exact integer coefficients.
///
/// Terms are kept sorted by variable and never carry a zero coefficient, so
/// structural equality is semantic equality of the polynomial.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Expr {
    terms: Vec<(Var, i64)>,
    constant: i64,
}

impl Expr {
    pub fn constant(k: i64) -> Self {
        Expr {
            terms: Vec::new(),
            constant: k,
        }
    }

    pub fn var(v: impl Into<Var>) -> Self {
        Expr {
            terms: vec![(v.into(), 1)],
            constant: 0,
        }
    }

    pub fn term(coeff: i64, v: impl Into<Var>) -> Self {
        Expr::from_terms([(v.into(), coeff)], 0)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Var, i64)>, constant: i64) -> Self {
        let mut out = Expr::constant(constant);
        for (v, c) in terms {
            out.add_term(v, c);
        }
        out
    }

    pub fn terms(&self) -> &[(Var, i64)] {
        &self.terms
    }

    pub fn constant_part(&self) -> i64 {
        self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, v: &Var) -> i64 {
        match self.terms.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        self.terms.iter().map(|(v, _)| v.clone()).collect()
    }

    pub fn add_term(&mut self, v: Var, c: i64) {
        if c == 0 {
            return;
        }
        match self.terms.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => {
                let sum = checked(self.terms[i].1.checked_add(c));
                if sum == 0 {
                    self.terms.remove(i);
                } else {
                    self.terms[i].1 = sum;
                }
            }
            Err(i) => self.terms.insert(i, (v, c)),
        }
    }

    pub fn add_constant(&mut self, k: i64) {
        self.constant = checked(self.constant.checked_add(k));
    }

    pub fn add(&self, other: &Expr) -> Expr {
        self.add_scaled(other, 1)
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add_scaled(other, -1)
    }

    /// `self + factor·other`
    pub fn add_scaled(&self, other: &Expr, factor: i64) -> Expr {
        if factor == 0 {
            return self.clone();
        }
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some((a, _)), Some((b, _))) => a.cmp(b),
                (Some(_), None) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            match ord {
                std::cmp::Ordering::Less => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    let (v, c) = &other.terms[j];
                    terms.push((v.clone(), checked(c.checked_mul(factor))));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = checked(
                        other.terms[j]
                            .1
                            .checked_mul(factor)
                            .and_then(|s| s.checked_add(self.terms[i].1)),
                    );
                    if c != 0 {
                        terms.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        let constant = checked(
            other
                .constant
                .checked_mul(factor)
                .and_then(|s| s.checked_add(self.constant)),
        );
        Expr { terms, constant }
    }

    pub fn scale(&self, factor: i64) -> Expr {
        if factor == 0 {
            return Expr::constant(0);
        }
        Expr {
            terms: self
                .terms
                .iter()
                .map(|(v, c)| (v.clone(), checked(c.checked_mul(factor))))
                .collect(),
            constant: checked(self.constant.checked_mul(factor)),
        }
    }

    pub fn neg(&self) -> Expr {
        self.scale(-1)
    }

    /// Simultaneously replaces every occurrence of `v` by `e`.
    pub fn substitute(&self, v: &Var, e: &Expr) -> Expr {
        let c = self.coeff(v);
        if c == 0 {
            return self.clone();
        }
        let mut without = self.clone();
        without.add_term(v.clone(), -c);
        without.add_scaled(e, c)
    }

    /// Evaluates under `lookup`, returning the first unbound variable on failure.
    pub fn eval_with(&self, mut lookup: impl FnMut(&Var) -> Option<i64>) -> Result<i64, &Var> {
        let mut acc = self.constant;
        for (v, c) in &self.terms {
            let x = lookup(v).ok_or(v)?;
            acc = checked(c.checked_mul(x).and_then(|t| t.checked_add(acc)));
        }
        Ok(acc)
    }

    /// Greatest common divisor of the coefficients (0 for a constant).
    pub fn coeff_gcd(&self) -> i64 {
        self.terms
            .iter()
            .fold(0i64, |g, (_, c)| num_integer::gcd(g, *c))
    }

    pub(crate) fn div_exact(&self, d: i64) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(v, c)| (v.clone(), c / d)).collect(),
            constant: self.constant / d,
        }
    }

    pub(crate) fn without_constant(&self) -> Expr {
        Expr {
            terms: self.terms.clone(),
            constant: 0,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.terms {
            let (sign, mag) = if *c < 0 { ("-", c.unsigned_abs()) } else { ("+", c.unsigned_abs()) };
            if first {
                if *c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}*{v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant < 0 {
            write!(f, " - {}", self.constant.unsigned_abs())
        } else if self.constant > 0 {
            write!(f, " + {}", self.constant)
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::var("x")
    }

    #[test]
    fn zero_coefficients_vanish() {
        let e = x().sub(&x());
        assert!(e.is_constant());
        assert_eq!(e, Expr::constant(0));
    }

    #[test]
    fn substitution_is_simultaneous() {
        // (2x + y)[x / x + 5] = 2x + y + 10
        let e = Expr::term(2, "x").add(&Expr::var("y"));
        let r = e.substitute(&Var::new("x"), &x().add(&Expr::constant(5)));
        assert_eq!(r, Expr::from_terms([("x".into(), 2), ("y".into(), 1)], 10));
    }

    #[test]
    fn display_is_readable() {
        let e = Expr::from_terms([("y".into(), -1), ("x".into(), 3)], -4);
        assert_eq!(e.to_string(), "3*x - y - 4");
        assert_eq!(Expr::constant(-2).to_string(), "-2");
        assert_eq!(Expr::term(-1, "z").to_string(), "-z");
    }
}
