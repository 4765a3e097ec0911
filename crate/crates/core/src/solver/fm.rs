//! Fourier–Motzkin elimination over exact big integers, with rational model
//! reconstruction and branch-and-bound for integrality.
//!
//! Rows are `Σ cᵢ·xᵢ ≤ k` or `Σ cᵢ·xᵢ = k` over dense variable indices.
//! Disequalities are handled lazily by case splitting once a candidate
//! integer model violates one.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) type Coeffs = Vec<(usize, BigInt)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Row {
    pub coeffs: Coeffs,
    pub rhs: BigInt,
    pub eq: bool,
}

/// Why a search gave up without an answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Exhausted {
    Depth,
    Rows,
}

pub(crate) struct Limits {
    pub branch_depth: u32,
    pub max_rows: usize,
}

enum Step {
    Subst { var: usize, row: Row },
    Project { var: usize, rows: Vec<Row> },
}

fn coeff_of(c: &Coeffs, var: usize) -> Option<&BigInt> {
    c.binary_search_by(|(v, _)| v.cmp(&var)).ok().map(|i| &c[i].1)
}

/// `a·p + b·q` on sparse coefficient vectors.
fn combine(p: &Coeffs, a: &BigInt, q: &Coeffs, b: &BigInt) -> Coeffs {
    let mut out = Vec::with_capacity(p.len() + q.len());
    let (mut i, mut j) = (0, 0);
    while i < p.len() || j < q.len() {
        match (p.get(i), q.get(j)) {
            (Some((vi, ci)), Some((vj, cj))) if vi == vj => {
                let c = a * ci + b * cj;
                if !c.is_zero() {
                    out.push((*vi, c));
                }
                i += 1;
                j += 1;
            }
            (Some((vi, ci)), Some((vj, _))) if vi < vj => {
                out.push((*vi, a * ci));
                i += 1;
            }
            (Some((vi, ci)), None) => {
                out.push((*vi, a * ci));
                i += 1;
            }
            (_, Some((vj, cj))) => {
                out.push((*vj, b * cj));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

enum Norm {
    Trivial,
    Contradiction,
    Row(Row),
}

fn normalize(mut row: Row) -> Norm {
    if row.coeffs.is_empty() {
        let ok = if row.eq { row.rhs.is_zero() } else { !row.rhs.is_negative() };
        return if ok { Norm::Trivial } else { Norm::Contradiction };
    }
    let g = row
        .coeffs
        .iter()
        .fold(BigInt::zero(), |g, (_, c)| g.gcd(c));
    if !g.is_one() {
        if row.eq {
            if !row.rhs.is_multiple_of(&g) {
                return Norm::Contradiction;
            }
            row.rhs /= &g;
        } else {
            // integer tightening: Σ (c/g)·x ≤ ⌊k/g⌋
            row.rhs = row.rhs.div_floor(&g);
        }
        for (_, c) in row.coeffs.iter_mut() {
            *c /= &g;
        }
    }
    if row.eq && row.coeffs[0].1.is_negative() {
        for (_, c) in row.coeffs.iter_mut() {
            *c = -&*c;
        }
        row.rhs = -row.rhs;
    }
    Norm::Row(row)
}

fn negated(c: &Coeffs) -> Coeffs {
    c.iter().map(|(v, x)| (*v, -x)).collect()
}

/// Normalises, deduplicates and merges opposite bounds. `None` on contradiction.
fn reduce(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut eqs: HashMap<Coeffs, BigInt> = HashMap::new();
    let mut les: HashMap<Coeffs, BigInt> = HashMap::new();
    let mut order: Vec<(Coeffs, bool)> = Vec::new();
    for r in rows {
        match normalize(r) {
            Norm::Trivial => {}
            Norm::Contradiction => return None,
            Norm::Row(r) => {
                if r.eq {
                    match eqs.get(&r.coeffs) {
                        Some(k) if *k != r.rhs => return None,
                        Some(_) => {}
                        None => {
                            order.push((r.coeffs.clone(), true));
                            eqs.insert(r.coeffs, r.rhs);
                        }
                    }
                } else {
                    match les.get_mut(&r.coeffs) {
                        Some(k) => {
                            if r.rhs < *k {
                                *k = r.rhs;
                            }
                        }
                        None => {
                            order.push((r.coeffs.clone(), false));
                            les.insert(r.coeffs, r.rhs);
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::with_capacity(order.len());
    for (coeffs, eq) in order {
        if eq {
            let rhs = eqs[&coeffs].clone();
            out.push(Row { coeffs, rhs, eq: true });
            continue;
        }
        let Some(upper) = les.get(&coeffs).cloned() else {
            continue;
        };
        let neg = negated(&coeffs);
        if let Some(lower_neg) = les.get(&neg).cloned() {
            // t ≤ upper and −t ≤ lower_neg, i.e. −lower_neg ≤ t ≤ upper
            let lower = -lower_neg;
            if lower > upper {
                return None;
            }
            if lower == upper {
                les.remove(&neg);
                les.remove(&coeffs);
                match normalize(Row { coeffs, rhs: upper, eq: true }) {
                    Norm::Row(r) => out.push(r),
                    Norm::Contradiction => return None,
                    Norm::Trivial => {}
                }
                continue;
            }
        }
        out.push(Row { coeffs, rhs: upper, eq: false });
    }
    // Equalities merged from opposite bounds may now clash with explicit ones.
    let mut seen: HashMap<&Coeffs, &BigInt> = HashMap::new();
    for r in out.iter().filter(|r| r.eq) {
        if let Some(k) = seen.insert(&r.coeffs, &r.rhs) {
            if k != &r.rhs {
                return None;
            }
        }
    }
    Some(out)
}

fn eliminate_with_equality(rows: Vec<Row>, eq_idx: usize, var: usize) -> (Row, Vec<Row>) {
    let mut rows = rows;
    let mut eq = rows.swap_remove(eq_idx);
    if coeff_of(&eq.coeffs, var).unwrap().is_negative() {
        eq.coeffs = negated(&eq.coeffs);
        eq.rhs = -eq.rhs;
    }
    let c = coeff_of(&eq.coeffs, var).unwrap().clone();
    let out = rows
        .into_iter()
        .map(|r| match coeff_of(&r.coeffs, var).cloned() {
            None => r,
            Some(a) => {
                // c·r − a·eq keeps the direction of r since c > 0
                let neg_a = -&a;
                Row {
                    coeffs: combine(&r.coeffs, &c, &eq.coeffs, &neg_a),
                    rhs: &c * &r.rhs - &a * &eq.rhs,
                    eq: r.eq,
                }
            }
        })
        .collect();
    (eq, out)
}

fn pick_projection_var(rows: &[Row]) -> usize {
    let mut counts: HashMap<usize, (usize, usize)> = HashMap::new();
    for r in rows {
        for (v, c) in &r.coeffs {
            let e = counts.entry(*v).or_default();
            if c.is_positive() {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }
    counts
        .into_iter()
        .min_by_key(|(v, (p, n))| ((p * n) as isize - (p + n) as isize, *v))
        .map(|(v, _)| v)
        .expect("non-empty system has a variable")
}

/// Rational feasibility. Returns a rational model (indexed by variable) or
/// `None` when the system has no rational, hence no integer, solution.
fn solve_rational(rows: Vec<Row>, nvars: usize, limits: &Limits) -> Result<Option<Vec<BigRational>>, Exhausted> {
    let mut steps = Vec::new();
    let mut rows = rows;
    loop {
        rows = match reduce(rows) {
            Some(r) => r,
            None => return Ok(None),
        };
        if rows.is_empty() {
            break;
        }
        if rows.len() > limits.max_rows {
            return Err(Exhausted::Rows);
        }
        let eq_choice = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.eq)
            .flat_map(|(i, r)| r.coeffs.iter().map(move |(v, c)| (i, *v, c.abs())))
            .min_by(|a, b| a.2.cmp(&b.2).then(a.1.cmp(&b.1)));
        if let Some((idx, var, _)) = eq_choice {
            let (row, rest) = eliminate_with_equality(rows, idx, var);
            steps.push(Step::Subst { var, row });
            rows = rest;
            continue;
        }
        let var = pick_projection_var(&rows);
        let (with, without): (Vec<Row>, Vec<Row>) =
            rows.into_iter().partition(|r| coeff_of(&r.coeffs, var).is_some());
        let (pos, neg): (Vec<&Row>, Vec<&Row>) = with
            .iter()
            .partition(|r| coeff_of(&r.coeffs, var).unwrap().is_positive());
        let mut next = without;
        for p in &pos {
            let a = coeff_of(&p.coeffs, var).unwrap();
            for n in &neg {
                let b = coeff_of(&n.coeffs, var).unwrap();
                let nb = -b;
                next.push(Row {
                    coeffs: combine(&p.coeffs, &nb, &n.coeffs, a),
                    rhs: &nb * &p.rhs + a * &n.rhs,
                    eq: false,
                });
            }
        }
        if next.len() > limits.max_rows {
            return Err(Exhausted::Rows);
        }
        steps.push(Step::Project { var, rows: with });
        rows = next;
    }

    let mut values: Vec<Option<BigRational>> = vec![None; nvars];
    let value_of = |values: &mut Vec<Option<BigRational>>, v: usize| -> BigRational {
        values[v].get_or_insert_with(BigRational::zero).clone()
    };
    for step in steps.into_iter().rev() {
        match step {
            Step::Subst { var, row } => {
                let mut rest = BigRational::from_integer(row.rhs.clone());
                let mut own = BigInt::zero();
                for (v, c) in &row.coeffs {
                    if *v == var {
                        own = c.clone();
                    } else {
                        rest -= BigRational::from_integer(c.clone()) * value_of(&mut values, *v);
                    }
                }
                values[var] = Some(rest / BigRational::from_integer(own));
            }
            Step::Project { var, rows } => {
                let mut lo: Option<BigRational> = None;
                let mut hi: Option<BigRational> = None;
                for r in &rows {
                    let mut rest = BigRational::from_integer(r.rhs.clone());
                    let mut own = BigInt::zero();
                    for (v, c) in &r.coeffs {
                        if *v == var {
                            own = c.clone();
                        } else {
                            rest -= BigRational::from_integer(c.clone()) * value_of(&mut values, *v);
                        }
                    }
                    let b = rest / BigRational::from_integer(own.clone());
                    if own.is_positive() {
                        if hi.as_ref().is_none_or(|h| b < *h) {
                            hi = Some(b);
                        }
                    } else if lo.as_ref().is_none_or(|l| b > *l) {
                        lo = Some(b);
                    }
                }
                values[var] = Some(choose_value(lo, hi));
            }
        }
    }
    Ok(Some(values.into_iter().map(|v| v.unwrap_or_else(BigRational::zero)).collect()))
}

/// Picks a value in `[lo, hi]`, preferring the integer closest to zero.
fn choose_value(lo: Option<BigRational>, hi: Option<BigRational>) -> BigRational {
    let zero = BigRational::zero();
    let mut candidate = zero;
    if let Some(l) = &lo {
        if candidate < *l {
            candidate = l.ceil();
        }
    }
    if let Some(h) = &hi {
        if candidate > *h {
            candidate = h.floor();
        }
    }
    let fits = lo.as_ref().is_none_or(|l| candidate >= *l) && hi.as_ref().is_none_or(|h| candidate <= *h);
    if fits {
        candidate
    } else {
        // no integer in the interval; any rational point will do
        lo.or(hi).unwrap()
    }
}

/// Whether every rational solution of `rows` has `coeffs · x = k`.
fn forced_equal(rows: &[Row], coeffs: &Coeffs, k: &BigInt, nvars: usize, limits: &Limits) -> Result<bool, Exhausted> {
    let side = |c: Coeffs, rhs: BigInt| -> Result<bool, Exhausted> {
        let mut r = rows.to_vec();
        r.push(Row { coeffs: c, rhs, eq: false });
        Ok(solve_rational(r, nvars, limits)?.is_none())
    };
    Ok(side(coeffs.clone(), k - BigInt::one())? && side(negated(coeffs), -(k + BigInt::one()))?)
}

/// Integer feasibility of `rows ∧ ⋀ (ne_i ≠ k_i)`.
pub(crate) fn solve_integer(
    rows: Vec<Row>,
    nes: &[(Coeffs, BigInt)],
    nvars: usize,
    limits: &Limits,
    depth: u32,
) -> Result<Option<Vec<BigInt>>, Exhausted> {
    let Some(model) = solve_rational(rows.clone(), nvars, limits)? else {
        return Ok(None);
    };
    if depth == 0 {
        for (coeffs, k) in nes {
            if forced_equal(&rows, coeffs, k, nvars, limits)? {
                return Ok(None);
            }
        }
    }
    let split = |extra_a: Row, extra_b: Row| -> Result<Option<Vec<BigInt>>, Exhausted> {
        if depth >= limits.branch_depth {
            return Err(Exhausted::Depth);
        }
        let mut left = rows.clone();
        left.push(extra_a);
        let first = solve_integer(left, nes, nvars, limits, depth + 1);
        if let Ok(Some(m)) = first {
            return Ok(Some(m));
        }
        let mut right = rows.clone();
        right.push(extra_b);
        match (first, solve_integer(right, nes, nvars, limits, depth + 1)) {
            (_, Ok(Some(m))) | (Ok(Some(m)), _) => Ok(Some(m)),
            (Ok(None), Ok(None)) => Ok(None),
            (Err(e), _) | (_, Err(e)) => Err(e),
        }
    };
    if let Some((var, q)) = model.iter().enumerate().find(|(_, q)| !q.is_integer()) {
        let down = Row {
            coeffs: vec![(var, BigInt::one())],
            rhs: q.floor().to_integer(),
            eq: false,
        };
        let up = Row {
            coeffs: vec![(var, -BigInt::one())],
            rhs: -q.ceil().to_integer(),
            eq: false,
        };
        return split(down, up);
    }
    let ints: Vec<BigInt> = model.into_iter().map(|q| q.to_integer()).collect();
    for (coeffs, k) in nes {
        let value: BigInt = coeffs.iter().map(|(v, c)| c * &ints[*v]).sum();
        if value == *k {
            let below = Row {
                coeffs: coeffs.clone(),
                rhs: k - BigInt::one(),
                eq: false,
            };
            let above = Row {
                coeffs: negated(coeffs),
                rhs: -(k + BigInt::one()),
                eq: false,
            };
            return split(below, above);
        }
    }
    Ok(Some(ints))
}
