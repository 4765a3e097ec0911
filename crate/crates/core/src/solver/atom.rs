//! Canonical linear atoms `Σ cᵢ·vᵢ ⋈ k` with `⋈ ∈ {≤, =, ≠}`.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;

use crate::lang::{Expr, Var};

/// Relation as written in source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "==",
            Rel::Ne => "!=",
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }
}

/// Relation of a canonical atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonRel {
    Le,
    Eq,
    Ne,
}

/// A linear atom in canonical form: `lhs ⋈ bound`, where `lhs` has no
/// constant part and its coefficients are coprime.
///
/// Strict inequalities are absorbed (`t < k` ↦ `t ≤ k−1`), `=` and `≠` have a
/// positive leading coefficient, and variable-free atoms collapse to the
/// canonical `0 ≤ 0` (true) or `0 ≤ −1` (false).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinAtom {
    lhs: Expr,
    rel: CanonRel,
    bound: i64,
}

impl LinAtom {
    pub fn new(lhs: &Expr, rel: Rel, rhs: &Expr) -> LinAtom {
        let diff = lhs.sub(rhs);
        let k = -diff.constant_part();
        let t = diff.without_constant();
        match rel {
            Rel::Le => LinAtom::canonical(t, CanonRel::Le, k),
            Rel::Lt => LinAtom::canonical(t, CanonRel::Le, k - 1),
            Rel::Ge => LinAtom::canonical(t.neg(), CanonRel::Le, -k),
            Rel::Gt => LinAtom::canonical(t.neg(), CanonRel::Le, -k - 1),
            Rel::Eq => LinAtom::canonical(t, CanonRel::Eq, k),
            Rel::Ne => LinAtom::canonical(t, CanonRel::Ne, k),
        }
    }

    pub fn le(lhs: Expr, rhs: Expr) -> LinAtom {
        LinAtom::new(&lhs, Rel::Le, &rhs)
    }

    pub fn eq(lhs: Expr, rhs: Expr) -> LinAtom {
        LinAtom::new(&lhs, Rel::Eq, &rhs)
    }

    pub fn truth() -> LinAtom {
        LinAtom {
            lhs: Expr::default(),
            rel: CanonRel::Le,
            bound: 0,
        }
    }

    pub fn falsity() -> LinAtom {
        LinAtom {
            lhs: Expr::default(),
            rel: CanonRel::Le,
            bound: -1,
        }
    }

    /// Builds the canonical atom for `t ⋈ k` (`t` must have no constant part).
    pub fn canonical(t: Expr, rel: CanonRel, k: i64) -> LinAtom {
        debug_assert_eq!(t.constant_part(), 0);
        if t.is_constant() {
            let holds = match rel {
                CanonRel::Le => 0 <= k,
                CanonRel::Eq => k == 0,
                CanonRel::Ne => k != 0,
            };
            return if holds { LinAtom::truth() } else { LinAtom::falsity() };
        }
        let g = t.coeff_gcd().abs();
        match rel {
            CanonRel::Le => LinAtom {
                lhs: t.div_exact(g),
                rel,
                bound: Integer::div_floor(&k, &g),
            },
            CanonRel::Eq | CanonRel::Ne => {
                if k % g != 0 {
                    return if rel == CanonRel::Eq { LinAtom::falsity() } else { LinAtom::truth() };
                }
                let (mut t, mut k) = (t.div_exact(g), k / g);
                if t.terms()[0].1 < 0 {
                    t = t.neg();
                    k = -k;
                }
                LinAtom { lhs: t, rel, bound: k }
            }
        }
    }

    pub fn lhs(&self) -> &Expr {
        &self.lhs
    }

    pub fn rel(&self) -> CanonRel {
        self.rel
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn is_true(&self) -> bool {
        self.lhs.is_constant() && self.bound >= 0
    }

    pub fn is_false(&self) -> bool {
        self.lhs.is_constant() && self.bound < 0
    }

    /// Exact integer negation: `¬(t ≤ k) ≡ −t ≤ −k−1`, `¬(t = k) ≡ t ≠ k`.
    pub fn negate(&self) -> LinAtom {
        if self.is_true() {
            return LinAtom::falsity();
        }
        if self.is_false() {
            return LinAtom::truth();
        }
        match self.rel {
            CanonRel::Le => LinAtom::canonical(self.lhs.neg(), CanonRel::Le, -self.bound - 1),
            CanonRel::Eq => LinAtom {
                rel: CanonRel::Ne,
                ..self.clone()
            },
            CanonRel::Ne => LinAtom {
                rel: CanonRel::Eq,
                ..self.clone()
            },
        }
    }

    pub fn substitute(&self, v: &Var, e: &Expr) -> LinAtom {
        if self.lhs.coeff(v) == 0 {
            return self.clone();
        }
        let t = self.lhs.substitute(v, e);
        let k = self.bound - t.constant_part();
        LinAtom::canonical(t.without_constant(), self.rel, k)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        self.lhs.free_vars()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.lhs.coeff(v) != 0
    }

    pub fn eval_with(&self, lookup: impl FnMut(&Var) -> Option<i64>) -> Result<bool, &Var> {
        let value = self.lhs.eval_with(lookup)?;
        Ok(match self.rel {
            CanonRel::Le => value <= self.bound,
            CanonRel::Eq => value == self.bound,
            CanonRel::Ne => value != self.bound,
        })
    }
}

impl fmt::Display for LinAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_true() {
            return f.write_str("0 <= 0");
        }
        if self.is_false() {
            return f.write_str("0 <= -1");
        }
        match self.rel {
            CanonRel::Le if self.lhs.terms().iter().all(|(_, c)| *c < 0) => {
                write!(f, "{} >= {}", self.lhs.neg(), -self.bound)
            }
            CanonRel::Le => write!(f, "{} <= {}", self.lhs, self.bound),
            CanonRel::Eq => write!(f, "{} == {}", self.lhs, self.bound),
            CanonRel::Ne => write!(f, "{} != {}", self.lhs, self.bound),
        }
    }
}

impl fmt::Debug for LinAtom {
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

    fn k(c: i64) -> Expr {
        Expr::constant(c)
    }

    #[test]
    fn strict_inequalities_are_absorbed() {
        assert_eq!(LinAtom::new(&x(), Rel::Lt, &k(2)), LinAtom::new(&x(), Rel::Le, &k(1)));
        assert_eq!(LinAtom::new(&x(), Rel::Gt, &k(0)), LinAtom::new(&x(), Rel::Ge, &k(1)));
    }

    #[test]
    fn gcd_normalisation_is_integer_exact() {
        // 2x <= 5  <=>  x <= 2 over the integers
        let a = LinAtom::new(&Expr::term(2, "x"), Rel::Le, &k(5));
        assert_eq!(a, LinAtom::new(&x(), Rel::Le, &k(2)));
        // 2x = 3 has no integer solution
        assert!(LinAtom::new(&Expr::term(2, "x"), Rel::Eq, &k(3)).is_false());
        assert!(LinAtom::new(&Expr::term(2, "x"), Rel::Ne, &k(3)).is_true());
    }

    #[test]
    fn equalities_are_sign_normalised() {
        let a = LinAtom::new(&Expr::term(-1, "x"), Rel::Eq, &Expr::var("y"));
        assert_eq!(a.lhs().terms()[0].1, 1);
        assert_eq!(a, LinAtom::new(&x(), Rel::Eq, &Expr::term(-1, "y")));
    }

    #[test]
    fn negation_is_an_involution() {
        for a in [
            LinAtom::new(&x(), Rel::Le, &k(3)),
            LinAtom::new(&x(), Rel::Eq, &Expr::var("y")),
            LinAtom::new(&x(), Rel::Ne, &k(0)),
            LinAtom::truth(),
        ] {
            assert_eq!(a.negate().negate(), a);
        }
    }

    #[test]
    fn display_flips_all_negative_inequalities() {
        assert_eq!(LinAtom::new(&x(), Rel::Ge, &k(3)).to_string(), "x >= 3");
        assert_eq!(LinAtom::new(&x(), Rel::Lt, &Expr::var("y")).to_string(), "x - y <= -1");
    }
}
