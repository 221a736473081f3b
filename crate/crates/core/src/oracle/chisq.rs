use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Partition of table entries into bins of roughly equal expected mass,
/// taken in a fixed order (e.g. decreasing μ).
#[derive(Clone, Debug)]
pub struct Binning {
    pub bin_of: Vec<usize>,
    pub expected: Vec<f64>,
}

impl Binning {
    pub fn bins(&self) -> usize {
        self.expected.len()
    }
}

/// Walks `order` accumulating `probs` and closes a bin each time the running
/// mass passes the next multiple of `1/bins`. Entries are never split, so a
/// heavy entry may get a bin of its own and there may be fewer bins.
pub fn equal_mass_bins(order: &[usize], probs: &[f64], bins: usize) -> Binning {
    let mut bin_of = vec![0; probs.len()];
    let mut expected = Vec::new();
    let total: f64 = probs.iter().sum();
    let (mut acc, mut current) = (0.0, 0.0);
    for &i in order {
        bin_of[i] = expected.len();
        current += probs[i] / total;
        acc += probs[i] / total;
        if acc >= (expected.len() + 1) as f64 / bins as f64 - 1e-12 {
            expected.push(current);
            current = 0.0;
        }
    }
    if current > 0.0 {
        expected.push(current);
    } else if let Some(&last) = order.last() {
        // Rounding left nothing for a final bin.
        debug_assert!(bin_of[last] < expected.len());
    }
    Binning { bin_of, expected }
}

/// Pearson χ² on binned chain output, with the statistic divided by an
/// autocorrelation inflation factor estimated by batch means.
///
/// For each bin the variance of per-batch counts is compared with the
/// multinomial variance an independent sample would have; the mean ratio
/// `τ̂` estimates how much serial correlation inflates the statistic.
#[derive(Clone, Debug)]
pub struct BatchedChiSquare {
    pub statistic: f64,
    pub inflation: f64,
    pub corrected: f64,
    pub df: usize,
    pub p_value: f64,
}

impl BatchedChiSquare {
    /// `batches[k][b]` is the number of draws in batch `k` that fell in bin
    /// `b`; all batches must have the same size.
    pub fn compute(expected: &[f64], batches: &[Vec<u64>]) -> Self {
        let bins = expected.len();
        let k = batches.len();
        let per_batch: u64 = batches[0].iter().sum();
        let total = per_batch as f64 * k as f64;
        let mut statistic = 0.0;
        let mut ratios = Vec::new();
        for b in 0..bins {
            let counts: Vec<f64> = batches.iter().map(|c| c[b] as f64).collect();
            let obs: f64 = counts.iter().sum();
            let exp = expected[b] * total;
            statistic += (obs - exp).powi(2) / exp;
            if k > 1 {
                let mean = obs / k as f64;
                let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
                let iid = per_batch as f64 * expected[b] * (1.0 - expected[b]);
                if iid > 0.0 {
                    ratios.push(var / iid);
                }
            }
        }
        let inflation = if ratios.is_empty() { 1.0 } else { (ratios.iter().sum::<f64>() / ratios.len() as f64).max(1.0) };
        let corrected = statistic / inflation;
        let df = bins.saturating_sub(1).max(1);
        let p_value = ChiSquared::new(df as f64).expect("df > 0").sf(corrected);
        Self { statistic, inflation, corrected, df, p_value }
    }
}

/// Total-variation distance between two count vectors over the same cells.
pub fn total_variation(a: &[u64], b: &[u64]) -> f64 {
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    0.5 * a.iter().zip(b).map(|(&x, &y)| (x as f64 / na - y as f64 / nb).abs()).sum::<f64>()
}
