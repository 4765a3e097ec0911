use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::ProgramPoint;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Depth-first, then-branch first.
    #[default]
    Dfs,
    /// Seeded random frontier selection.
    Random,
}

/// What the random picker sees of one frontier entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub point: ProgramPoint,
    pub depth: u32,
    /// Exploring this entry is the last thing its parent waits for.
    pub closes_parent: bool,
}

/// Rotates through three policies: uniform, weighted by `1/(1+visits)` of
/// the target point, and deepest entry that completes its parent.
#[derive(Clone, Debug)]
pub struct RandomPicker {
    rng: ChaCha8Rng,
    turn: usize,
}

impl RandomPicker {
    pub fn new(seed: u64) -> Self {
        RandomPicker {
            rng: ChaCha8Rng::seed_from_u64(seed),
            turn: 0,
        }
    }

    /// Index into `frontier` (must be non-empty). `visits` is indexed by
    /// program point.
    pub fn pick(&mut self, frontier: &[Candidate], visits: &[u64]) -> usize {
        assert!(!frontier.is_empty());
        let turn = self.turn;
        self.turn = (self.turn + 1) % 3;
        match turn {
            0 => self.rng.gen_range(0..frontier.len()),
            1 => {
                let weights = frontier
                    .iter()
                    .map(|c| 1.0 / (1.0 + visits.get(c.point.0 as usize).copied().unwrap_or(0) as f64));
                let dist = WeightedIndex::new(weights).expect("positive weights");
                dist.sample(&mut self.rng)
            }
            _ => {
                let best = frontier
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.closes_parent)
                    .fold(None::<(usize, u32)>, |best, (i, c)| match best {
                        Some((_, d)) if d >= c.depth => best,
                        _ => Some((i, c.depth)),
                    });
                match best {
                    Some((i, _)) => i,
                    None => self.rng.gen_range(0..frontier.len()),
                }
            }
        }
    }
}

/// Picks the next frontier entry. Depth-first takes the most recently pushed
/// entry.
pub fn choose_next(frontier: &[Candidate], strategy: Strategy, picker: &mut RandomPicker, visits: &[u64]) -> usize {
    match strategy {
        Strategy::Dfs => frontier.len() - 1,
        Strategy::Random => picker.pick(frontier, visits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cands() -> Vec<Candidate> {
        (0..6)
            .map(|i| Candidate {
                point: ProgramPoint(i),
                depth: i,
                closes_parent: i % 2 == 0,
            })
            .collect()
    }

    #[test]
    fn same_seed_same_choices() {
        let f = cands();
        let visits = vec![3, 0, 1, 7, 0, 2];
        let run = |seed| {
            let mut p = RandomPicker::new(seed);
            (0..30).map(|_| p.pick(&f, &visits)).collect::<Vec<_>>()
        };
        assert_eq!(run(7), run(7));
        assert_ne!(run(7), run(8));
    }

    #[test]
    fn third_policy_prefers_deepest_closing_entry() {
        let f = cands();
        let mut p = RandomPicker::new(0);
        p.pick(&f, &[]);
        p.pick(&f, &[]);
        assert_eq!(p.pick(&f, &[]), 4);
    }

    #[test]
    fn depth_first_takes_the_top() {
        let f = cands();
        let mut p = RandomPicker::new(0);
        assert_eq!(choose_next(&f, Strategy::Dfs, &mut p, &[]), 5);
    }
}
