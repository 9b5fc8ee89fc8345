//! Noisy hierarchical histogram over equal-width buckets, read back as a
//! CDF.

use crate::dataset::{QuantileEstimates, QuantileSpec, SortedDataset};
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::rng::RandomSource;

/// Largest number of leaf buckets a tree may have.
pub const MAX_LEAVES: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggTreeConfig {
    pub branching: usize,
    pub height: usize,
    /// `f64::INFINITY` turns the noise off.
    pub epsilon: f64,
}

impl AggTreeConfig {
    pub fn new(branching: usize, height: usize, epsilon: f64) -> Result<Self> {
        if branching < 2 || height < 1 {
            return Err(Error::InvalidParameter(format!(
                "tree needs branching >= 2 and height >= 1, got {branching} and {height}"
            )));
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        let leaves = (branching as u128).checked_pow(height as u32).unwrap_or(u128::MAX);
        if leaves > MAX_LEAVES {
            return Err(Error::GuardExceeded {
                size: leaves,
                limit: MAX_LEAVES,
            });
        }
        Ok(Self {
            branching,
            height,
            epsilon,
        })
    }

    /// Tuned shape for `m` quantiles at budget `epsilon`. Beyond the tuned
    /// range the last row is reused.
    pub fn tuned(m: usize, metric: Metric, epsilon: f64) -> Result<Self> {
        let (height, branching) = tuned_shape(m, metric);
        Self::new(branching, height, epsilon)
    }

    pub fn leaves(&self) -> usize {
        self.branching.pow(self.height as u32)
    }

    pub fn is_noiseless(&self) -> bool {
        self.epsilon.is_infinite()
    }
}

const TUNED_HEIGHT_MISCLASSIFIED: [usize; 29] = [
    4, 3, 3, 3, 2, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3,
];
const TUNED_BRANCHING_MISCLASSIFIED: [usize; 29] = [
    4, 6, 6, 9, 14, 10, 7, 7, 10, 10, 8, 7, 7, 12, 10, 10, 10, 10, 7, 10, 10, 7, 10, 12, 12, 12, 10, 10, 12,
];
const TUNED_BRANCHING_DISTANCE: [usize; 29] = [
    8, 6, 6, 10, 9, 9, 10, 10, 12, 12, 10, 10, 7, 10, 8, 8, 10, 7, 10, 10, 12, 8, 10, 12, 10, 7, 5, 7, 5,
];

/// `(height, branching)` tuned on standard normal data for `m` quantiles.
pub fn tuned_shape(m: usize, metric: Metric) -> (usize, usize) {
    let idx = m.clamp(1, 29) - 1;
    match metric {
        Metric::Misclassified => (TUNED_HEIGHT_MISCLASSIFIED[idx], TUNED_BRANCHING_MISCLASSIFIED[idx]),
        Metric::Distance => (3, TUNED_BRANCHING_DISTANCE[idx]),
    }
}

#[derive(Debug, Clone)]
pub struct AggTree {
    config: AggTreeConfig,
    lower: f64,
    upper: f64,
    total: f64,
    /// `counts[l][v]` for node `v` at depth `l`; depth 0 is the root.
    counts: Vec<Vec<f64>>,
    aggregated: Vec<Vec<f64>>,
}

impl AggTree {
    pub fn config(&self) -> &AggTreeConfig {
        &self.config
    }

    /// Released count of node `node` at depth `level`.
    pub fn count(&self, level: usize, node: usize) -> f64 {
        self.counts[level][node]
    }

    pub fn level(&self, level: usize) -> &[f64] {
        &self.counts[level]
    }

    pub fn aggregated_level(&self, level: usize) -> &[f64] {
        &self.aggregated[level]
    }

    pub fn bucket_width(&self) -> f64 {
        (self.upper - self.lower) / self.config.leaves() as f64
    }

    /// Estimated number of points in the first `k` leaf buckets, read off
    /// the canonical decomposition of `[0, k)` into tree nodes.
    pub fn prefix_count(&self, k: usize) -> f64 {
        self.prefix_counts()[k]
    }

    /// [`AggTree::prefix_count`] for `k = 0..=leaves`, before any
    /// monotonicity repair.
    pub fn prefix_counts(&self) -> Vec<f64> {
        let b = self.config.branching;
        let h = self.config.height;
        let leaves = self.config.leaves();
        let prefix_sums: Vec<Vec<f64>> = self
            .aggregated
            .iter()
            .map(|lvl| {
                let mut acc = Vec::with_capacity(lvl.len() + 1);
                acc.push(0.0);
                let mut run = 0.0;
                for v in lvl {
                    run += v;
                    acc.push(run);
                }
                acc
            })
            .collect();
        let mut out = Vec::with_capacity(leaves + 1);
        for k in 0..leaves {
            let mut f = 0.0;
            let mut node = 0usize;
            let mut stride = leaves;
            for sums in prefix_sums.iter().skip(1).take(h) {
                stride /= b;
                let digit = (k / stride) % b;
                f += sums[node * b + digit] - sums[node * b];
                node = node * b + digit;
            }
            out.push(f);
        }
        out.push(self.aggregated[0][0]);
        out
    }

    /// Monotone CDF in counts at every leaf edge, clamped to `[0, n]`
    /// (`n` is public).
    pub fn cdf(&self) -> Vec<f64> {
        let mut f = self.prefix_counts();
        let mut run = 0.0f64;
        for v in f.iter_mut() {
            run = run.max(*v);
            *v = run.clamp(0.0, self.total);
        }
        f
    }
}

/// Exact counts plus `Lap(h / eps)` at every node, root included.
///
/// Draw order: root first, then depth by depth, left to right, one Laplace
/// draw per node.
pub fn agg_tree_build(dataset: &SortedDataset, config: &AggTreeConfig, rng: &mut RandomSource) -> AggTree {
    let b = config.branching;
    let h = config.height;
    let leaves = config.leaves();
    let (lower, upper) = (dataset.lower(), dataset.upper());
    let width = (upper - lower) / leaves as f64;

    let mut exact: Vec<Vec<f64>> = vec![vec![0.0; leaves]];
    for &x in dataset.values() {
        let k = (((x - lower) / width).floor().max(0.0) as usize).min(leaves - 1);
        exact[0][k] += 1.0;
    }
    for _ in 0..h {
        let child = exact.last().unwrap();
        let parent: Vec<f64> = child.chunks(b).map(|c| c.iter().sum()).collect();
        exact.push(parent);
    }
    exact.reverse();

    let scale = h as f64 / config.epsilon;
    let mut counts = exact;
    if !config.is_noiseless() {
        for level in counts.iter_mut() {
            for c in level.iter_mut() {
                *c += scale * rng.laplace();
            }
        }
    }
    let aggregated = aggregate(&counts, b, if config.is_noiseless() { 0.0 } else { 2.0 * scale * scale });
    AggTree {
        config: *config,
        lower,
        upper,
        total: dataset.len() as f64,
        counts,
        aggregated,
    }
}

/// Leaves upward, each internal node becomes the inverse-variance blend of
/// its own count and the sum of its children's blended values.
fn aggregate(counts: &[Vec<f64>], b: usize, node_variance: f64) -> Vec<Vec<f64>> {
    let h = counts.len() - 1;
    let mut out = counts.to_vec();
    if node_variance == 0.0 {
        return out;
    }
    let mut child_var = vec![node_variance; counts[h].len()];
    for level in (0..h).rev() {
        let mut var = Vec::with_capacity(counts[level].len());
        for v in 0..counts[level].len() {
            let kids = &out[level + 1][v * b..(v + 1) * b];
            let kids_sum: f64 = kids.iter().sum();
            let kids_var: f64 = child_var[v * b..(v + 1) * b].iter().sum();
            let w_own = 1.0 / node_variance;
            let w_kids = 1.0 / kids_var;
            out[level][v] = (w_own * counts[level][v] + w_kids * kids_sum) / (w_own + w_kids);
            var.push(1.0 / (w_own + w_kids));
        }
        child_var = var;
    }
    out
}

/// For each `q`, the first leaf edge where the CDF reaches `q n`, with
/// linear interpolation inside the bucket before it.
pub fn agg_tree_quantiles(tree: &AggTree, spec: &QuantileSpec) -> QuantileEstimates {
    let f = tree.cdf();
    let width = tree.bucket_width();
    let outputs = spec
        .quantiles()
        .iter()
        .map(|&q| {
            // same nudge as the nearest-rank convention, so 0.7 * 10 targets 7
            let target = q * tree.total - 1e-9;
            match (1..f.len()).find(|&k| f[k] >= target) {
                Some(k) => {
                    let lo = tree.lower + (k - 1) as f64 * width;
                    let rise = f[k] - f[k - 1];
                    let frac = if rise > 0.0 {
                        ((target - f[k - 1]) / rise).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    (lo + frac * width).clamp(tree.lower, tree.upper)
                }
                None => tree.upper,
            }
        })
        .collect();
    QuantileEstimates::new(outputs)
}

/// Build a tree and read every quantile off it.
pub fn agg_tree(
    dataset: &SortedDataset,
    spec: &QuantileSpec,
    config: &AggTreeConfig,
    rng: &mut RandomSource,
) -> QuantileEstimates {
    agg_tree_quantiles(&agg_tree_build(dataset, config, rng), spec)
}
