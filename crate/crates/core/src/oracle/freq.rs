use super::chisq::{BatchedChiSquare, Binning};
use super::enumerate::GraphTable;
use crate::junction_tree::JunctionTree;

/// Tallies which graph a chain visits, overall and per batch of consecutive
/// draws, for comparison with exact table probabilities.
#[derive(Clone, Debug)]
pub struct FrequencyRecorder<'a> {
    table: &'a GraphTable,
    binning: Binning,
    counts: Vec<u64>,
    batch_bins: Vec<Vec<u64>>,
    batch_len: u64,
    draws: u64,
}

impl<'a> FrequencyRecorder<'a> {
    /// `planned_draws` is split into `batches` equal batches; draws beyond
    /// `batches · ⌊planned/batches⌋` count only towards the totals.
    pub fn new(table: &'a GraphTable, binning: Binning, planned_draws: u64, batches: usize) -> Self {
        let bins = binning.bins();
        Self {
            table,
            binning,
            counts: vec![0; table.len()],
            batch_bins: vec![vec![0; bins]; batches],
            batch_len: (planned_draws / batches as u64).max(1),
            draws: 0,
        }
    }

    pub fn record(&mut self, j: &JunctionTree) {
        let idx = self.table.index_of_tree(j).expect("chain state is a decomposable graph of the table");
        self.record_index(idx);
    }

    pub fn record_index(&mut self, idx: usize) {
        self.counts[idx] += 1;
        let batch = (self.draws / self.batch_len) as usize;
        if let Some(row) = self.batch_bins.get_mut(batch) {
            row[self.binning.bin_of[idx]] += 1;
        }
        self.draws += 1;
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn chi_square(&self) -> BatchedChiSquare {
        BatchedChiSquare::compute(&self.binning.expected, &self.batch_bins)
    }

    /// `(expected, observed)` cumulative distribution along `order`.
    pub fn cdf(&self, order: &[usize], probs: &[f64]) -> Vec<(f64, f64)> {
        let total = self.counts.iter().sum::<u64>().max(1) as f64;
        let (mut e, mut o) = (0.0, 0.0);
        order
            .iter()
            .map(|&i| {
                e += probs[i];
                o += self.counts[i] as f64 / total;
                (e, o)
            })
            .collect()
    }
}
