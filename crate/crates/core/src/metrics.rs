//! Error metrics against nearest-rank true quantiles.

use crate::dataset::{QuantileEstimates, QuantileSpec, SortedDataset};
use crate::error::{Error, Result};

/// Which error the experiments report and tune for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    /// Data points between estimated and true quantile, per quantile.
    #[default]
    Misclassified,
    /// Mean absolute distance to the true quantiles.
    Distance,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "misclassified" => Ok(Metric::Misclassified),
            "distance" => Ok(Metric::Distance),
            other => Err(Error::InvalidParameter(format!("unknown metric {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub misclassified_total: usize,
    pub misclassified_per_quantile: f64,
    pub distance_per_quantile: f64,
}

/// 1-based nearest rank `ceil(q n)`, clamped to `[1, n]`.
///
/// `q n` is nudged down by `1e-9` before the ceiling so products such as
/// `0.7 * 10 = 7.000000000000001` land on the intended rank.
pub fn nearest_rank(q: f64, n: usize) -> usize {
    let r = (q * n as f64 - 1e-9).ceil();
    (r.max(1.0) as usize).min(n)
}

pub fn true_quantiles(dataset: &SortedDataset, spec: &QuantileSpec) -> QuantileEstimates {
    let n = dataset.len();
    QuantileEstimates::new(
        spec.quantiles()
            .iter()
            .map(|&q| dataset.values()[nearest_rank(q, n) - 1])
            .collect(),
    )
}

/// Per quantile, the number of points in `[min(o, o'), max(o, o'))`.
pub fn misclassified_counts(
    dataset: &SortedDataset,
    truth: &QuantileEstimates,
    estimate: &QuantileEstimates,
) -> Result<Vec<usize>> {
    check_lengths(truth, estimate)?;
    Ok(truth
        .values()
        .iter()
        .zip(estimate.values())
        .map(|(&t, &e)| dataset.count_in(t.min(e), t.max(e)))
        .collect())
}

/// Mean absolute componentwise difference.
pub fn distance_error(truth: &QuantileEstimates, estimate: &QuantileEstimates) -> Result<f64> {
    check_lengths(truth, estimate)?;
    let total: f64 = truth
        .values()
        .iter()
        .zip(estimate.values())
        .map(|(t, e)| (t - e).abs())
        .sum();
    Ok(total / truth.len() as f64)
}

pub fn error_report(
    dataset: &SortedDataset,
    truth: &QuantileEstimates,
    estimate: &QuantileEstimates,
) -> Result<ErrorReport> {
    let total: usize = misclassified_counts(dataset, truth, estimate)?.into_iter().sum();
    Ok(ErrorReport {
        misclassified_total: total,
        misclassified_per_quantile: total as f64 / truth.len() as f64,
        distance_per_quantile: distance_error(truth, estimate)?,
    })
}

fn check_lengths(truth: &QuantileEstimates, estimate: &QuantileEstimates) -> Result<()> {
    if truth.len() != estimate.len() || truth.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            actual: estimate.len(),
        });
    }
    Ok(())
}
