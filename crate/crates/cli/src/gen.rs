//! Benchmark program generators.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid matrix: {0}")]
pub struct InvalidMatrix(pub String);

/// Edge weights of a graph on vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Weights {
    /// `(from, to, weight)` triples.
    Edges(Vec<(usize, usize, i64)>),
    /// A random forward DAG drawn from the given seed.
    LayeredRandom(u64),
}

/// `matrix[i][j]` is the weight of the edge `i+1 -> j+1`, if any.
pub type Matrix = Vec<Vec<Option<i64>>>;

impl Weights {
    pub fn matrix(&self, n: usize) -> Result<Matrix, InvalidMatrix> {
        if n < 2 {
            return Err(InvalidMatrix(format!("need at least 2 vertices, got {n}")));
        }
        let mut m = vec![vec![None; n]; n];
        match self {
            Weights::Edges(edges) => {
                for &(i, j, w) in edges {
                    if i < 1 || j > n || i >= j {
                        return Err(InvalidMatrix(format!("edge {i}-{j} is not a forward edge on 1..={n}")));
                    }
                    if w <= 0 {
                        return Err(InvalidMatrix(format!("edge {i}-{j} has non-positive weight {w}")));
                    }
                    if m[i - 1][j - 1].replace(w).is_some() {
                        return Err(InvalidMatrix(format!("edge {i}-{j} given twice")));
                    }
                }
            }
            Weights::LayeredRandom(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for i in 0..n - 1 {
                    m[i][i + 1] = Some(rng.gen_range(1..=99));
                    for j in i + 2..n.min(i + 4) {
                        if rng.gen_bool(0.5) {
                            m[i][j] = Some(rng.gen_range(1..=99));
                        }
                    }
                }
            }
        }
        if let Some(v) = (0..n - 1).find(|&i| m[i].iter().all(Option::is_none)) {
            return Err(InvalidMatrix(format!("vertex {} has no successor", v + 1)));
        }
        Ok(m)
    }
}

impl FromStr for Weights {
    type Err = InvalidMatrix;

    /// Either `layered-random(SEED)` or a comma separated edge list such as
    /// `1-2:20,2-3:40`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(seed) = s.strip_prefix("layered-random(").and_then(|r| r.strip_suffix(')')) {
            let seed = seed.trim().parse().map_err(|_| InvalidMatrix(format!("bad seed `{seed}`")))?;
            return Ok(Weights::LayeredRandom(seed));
        }
        let bad = |e: &str| InvalidMatrix(format!("bad edge `{e}`, expected FROM-TO:WEIGHT"));
        let mut edges = Vec::new();
        for e in s.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (ends, w) = e.split_once(':').ok_or_else(|| bad(e))?;
            let (i, j) = ends.split_once('-').ok_or_else(|| bad(e))?;
            let num = |t: &str| t.trim().parse().map_err(|_| bad(e));
            edges.push((num(i)? as usize, num(j)? as usize, num(w)?));
        }
        Ok(Weights::Edges(edges))
    }
}

/// A program walking every monotone path from vertex 1 to vertex `n`,
/// accumulating the distance in `d` and asserting `d >= BOUND` on arrival.
///
/// The successor of each vertex with more than one outgoing edge is chosen
/// by a symbolic input `c<v>`.
pub fn gen_shortest_path(n: usize, weights: &Weights, bound: i64) -> Result<String, InvalidMatrix> {
    let m = weights.matrix(n)?;
    let succ = |v: usize| -> Vec<(usize, i64)> {
        m[v - 1]
            .iter()
            .enumerate()
            .filter_map(|(j, w)| w.map(|w| (j + 1, w)))
            .collect()
    };

    let mut out = String::new();
    for v in 1..n {
        let s = succ(v);
        if s.len() > 1 {
            writeln!(out, "sym c{v} in [{}, {}]", s[0].0, s[s.len() - 1].0).unwrap();
        }
    }
    out.push_str("var node = 1\nvar d = 0\n");
    writeln!(out, "var BOUND = {bound}").unwrap();
    writeln!(out, "while (node < {n}) {{").unwrap();

    let step = |to: usize, w: i64| format!("d = d + {w}; node = {to}");
    let body = |v: usize| -> String {
        let s = succ(v);
        let (&(to, w), rest) = s.split_last().unwrap();
        if rest.is_empty() {
            return step(to, w);
        }
        let mut b = String::new();
        for &(to, w) in rest {
            write!(b, "if (c{v} == {to}) {{ {} }} else ", step(to, w)).unwrap();
        }
        write!(b, "{{ {} }}", step(to, w)).unwrap();
        b
    };

    if n == 2 {
        writeln!(out, "    {}", body(1)).unwrap();
    } else {
        for v in 1..n {
            if v == 1 {
                out.push_str("    if (node == 1) {\n");
            } else if v == n - 1 {
                out.push_str("    } else {\n");
            } else {
                writeln!(out, "    }} else if (node == {v}) {{").unwrap();
            }
            writeln!(out, "        {}", body(v)).unwrap();
        }
        out.push_str("    }\n");
    }
    out.push_str("}\nassert(d >= BOUND)\n");
    Ok(out)
}

/// `n` independent inputs `b<i>`, each setting `k<i>` to `1` or `-1`,
/// followed by assertions bounding the sum of the `k<i>` by `n` either way.
pub fn gen_bitsum(n: usize) -> String {
    assert!(n >= 1, "bit count must be positive");
    let mut s = String::new();
    for i in 1..=n {
        writeln!(s, "sym b{i} in [0, 1]").unwrap();
    }
    for i in 1..=n {
        writeln!(s, "var k{i} = 0").unwrap();
    }
    for i in 1..=n {
        writeln!(s, "if (b{i} > 0) {{ k{i} = 1 }} else {{ k{i} = -1 }}").unwrap();
    }
    let sum = (1..=n).map(|i| format!("k{i}")).collect::<Vec<_>>().join(" + ");
    writeln!(s, "assert({sum} >= -{n})\nassert({sum} <= {n})").unwrap();
    s
}
