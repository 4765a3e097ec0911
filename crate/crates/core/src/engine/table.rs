use std::collections::BTreeMap;

use crate::interp::Interpolant;
use crate::lang::ProgramPoint;

/// One stored interpolant. Interpolants computed from a subtree that was cut
/// by the loop bound carry the loop counters of the state they came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub interpolant: Interpolant,
    pub counters: Option<Vec<u32>>,
}

impl Entry {
    /// Whether a state with loop counters `counters` may use this entry.
    pub fn admits(&self, counters: &[u32]) -> bool {
        match &self.counters {
            None => true,
            Some(stored) => stored.iter().zip(counters).all(|(s, c)| c >= s),
        }
    }
}

/// Interpolants per program point, kept in insertion order.
#[derive(Clone, Debug, Default)]
pub struct SubsumptionTable {
    entries: BTreeMap<ProgramPoint, Vec<Entry>>,
    len: usize,
}

impl SubsumptionTable {
    pub fn new() -> Self {
        SubsumptionTable::default()
    }

    /// Adds an entry unless an identical one is already stored at `point`.
    /// Returns whether the table grew.
    pub fn insert(&mut self, point: ProgramPoint, entry: Entry) -> bool {
        let list = self.entries.entry(point).or_default();
        if list.contains(&entry) {
            return false;
        }
        list.push(entry);
        self.len += 1;
        true
    }

    /// Entries at `point`, most recent first.
    pub fn lookup(&self, point: ProgramPoint) -> impl Iterator<Item = &Entry> {
        self.entries.get(&point).into_iter().flat_map(|l| l.iter().rev())
    }

    /// Entries at `point` in insertion order.
    pub fn at(&self, point: ProgramPoint) -> &[Entry] {
        self.entries.get(&point).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (ProgramPoint, &Entry)> {
        self.entries.iter().flat_map(|(p, l)| l.iter().map(move |e| (*p, e)))
    }
}
