use crate::dataset::{QuantileEstimates, QuantileSpec, SortedDataset};

use super::MechanismParams;

/// Joint quantile utility: minus the total L1 gap between the number of
/// points in each estimated interval `[o_{j-1}, o_j)` and its target count,
/// with `o_0 = a` and `o_{m+1} = b + 1`.
pub fn utility(dataset: &SortedDataset, spec: &QuantileSpec, estimates: &QuantileEstimates) -> f64 {
    let targets = spec.gap_counts(dataset.len());
    let lower = dataset.lower();
    let upper = dataset.upper() + 1.0;
    let bounds: Vec<f64> = std::iter::once(lower)
        .chain(estimates.values().iter().copied())
        .chain(std::iter::once(upper))
        .collect();
    -bounds
        .windows(2)
        .zip(&targets)
        .map(|(w, &target)| (dataset.count_in(w[0], w[1]) as f64 - target).abs())
        .sum::<f64>()
}

/// Utility of an interval sequence, with `i_0 = 0` and `i_{m+1} = n`.
pub fn sequence_utility(n: usize, spec: &QuantileSpec, indices: &[usize]) -> f64 {
    let targets = spec.gap_counts(n);
    let mut prev = 0usize;
    let mut total = 0.0;
    for (j, &i) in indices.iter().chain(std::iter::once(&n)).enumerate() {
        total += ((i as f64 - prev as f64) - targets[j]).abs();
        prev = i;
    }
    -total
}

/// Log pairwise potential between consecutive intervals.
///
/// `log_phi(g, j) = -eps * |g - n_j| / (2 * sensitivity)` for a gap `g >= 0`
/// between the previous and the current interval index, and `-inf` for
/// negative gaps (order violations).
#[derive(Debug, Clone)]
pub struct PhiKernel {
    coef: f64,
    targets: Vec<f64>,
}

impl PhiKernel {
    pub fn new(n: usize, spec: &QuantileSpec, params: &MechanismParams) -> Self {
        Self {
            coef: params.epsilon() / (2.0 * params.sensitivity()),
            targets: spec.gap_counts(n),
        }
    }

    /// `j` is 1-based, in `1..=m+1`.
    #[inline]
    pub fn log_phi(&self, gap: i64, j: usize) -> f64 {
        if gap < 0 {
            return f64::NEG_INFINITY;
        }
        -self.coef * (gap as f64 - self.targets[j - 1]).abs()
    }
}

/// `ln(x_{i+1} - x_i)`; `-inf` for zero-width intervals.
pub fn log_tau(i: usize, dataset: &SortedDataset) -> f64 {
    dataset.interval_width(i).ln()
}
