use std::collections::HashMap;

use super::Dataset;
use crate::vertex_set::VertexSet;

/// Sufficient statistics of the data restricted to a vertex subset `D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubsetStats {
    pub v_d: usize,
    /// `Σ_r (Σ_{i∈D} y_i^(r))²`.
    pub q1: f64,
    /// `Σ_r Σ_{i∈D} (y_i^(r))²`.
    pub q2: f64,
}

impl SubsetStats {
    pub fn compute(data: &Dataset, d: &VertexSet) -> Self {
        let q2 = d.iter().map(|i| data.column_square_sum(i as usize)).sum();
        let q1 = match d.as_slice() {
            [] => 0.0,
            [i] => data.column_square_sum(*i as usize),
            [first, rest @ ..] => {
                let mut sums = data.column(*first as usize).to_vec();
                for &i in rest {
                    for (s, y) in sums.iter_mut().zip(data.column(i as usize)) {
                        *s += y;
                    }
                }
                sums.iter().map(|s| s * s).sum()
            }
        };
        Self { v_d: d.len(), q1, q2 }
    }
}

pub const DEFAULT_CACHE_CAPACITY: usize = 1_000_000;

/// Per-chain cache of [`SubsetStats`] keyed by subset. When it outgrows its
/// capacity the least recently used half is dropped.
#[derive(Clone, Debug)]
pub struct StatsCache {
    entries: HashMap<VertexSet, (SubsetStats, u64)>,
    capacity: usize,
    clock: u64,
    hits: u64,
    misses: u64,
}

impl Default for StatsCache {
    fn default() -> Self {
        Self::with_capacity(DEFAULT_CACHE_CAPACITY)
    }
}

impl StatsCache {
    pub fn with_capacity(capacity: usize) -> Self {
        Self { entries: HashMap::new(), capacity: capacity.max(1), clock: 0, hits: 0, misses: 0 }
    }

    pub fn get(&mut self, data: &Dataset, d: &VertexSet) -> SubsetStats {
        self.clock += 1;
        let now = self.clock;
        if let Some(entry) = self.entries.get_mut(d) {
            entry.1 = now;
            self.hits += 1;
            return entry.0;
        }
        self.misses += 1;
        let stats = SubsetStats::compute(data, d);
        if self.entries.len() >= self.capacity {
            self.evict();
        }
        self.entries.insert(d.clone(), (stats, now));
        stats
    }

    fn evict(&mut self) {
        let mut stamps: Vec<u64> = self.entries.values().map(|e| e.1).collect();
        let mid = stamps.len() / 2;
        let (_, cutoff, _) = stamps.select_nth_unstable(mid);
        let cutoff = *cutoff;
        self.entries.retain(|_, e| e.1 > cutoff);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }
}
