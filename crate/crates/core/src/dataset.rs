//! Domain types shared by every estimator.

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Clamped, sorted data with its declared range `[lower, upper]`.
///
/// Interval `i` (for `i` in `0..=n`) is `[x_i, x_{i+1})` with the sentinels
/// `x_0 = lower` and `x_{n+1} = upper`; see [`SortedDataset::point`].
#[derive(Debug, Clone, PartialEq)]
pub struct SortedDataset {
    values: Vec<f64>,
    lower: f64,
    upper: f64,
}

/// Sort and clamp raw observations into `[lower, upper]`.
pub fn prepare_dataset(raw: &[f64], lower: f64, upper: f64) -> Result<SortedDataset> {
    check_range(lower, upper)?;
    if raw.is_empty() {
        return Err(Error::EmptyData);
    }
    if let Some(bad) = raw.iter().find(|v| v.is_nan()) {
        return Err(Error::InvalidParameter(format!("data value {bad} is not a number")));
    }
    let mut values: Vec<f64> = raw.iter().map(|v| v.clamp(lower, upper)).collect();
    values.sort_by(f64::total_cmp);
    Ok(SortedDataset {
        values,
        lower,
        upper,
    })
}

fn check_range(lower: f64, upper: f64) -> Result<()> {
    if !(lower.is_finite() && upper.is_finite() && lower < upper) {
        return Err(Error::InvalidRange { lower, upper });
    }
    Ok(())
}

/// Perturb every point by independent `U[-scale, scale]` noise, then clamp and
/// re-sort. Consumes one uniform per point, in sorted order; `scale == 0`
/// returns the input untouched and consumes nothing.
pub fn jitter(dataset: &SortedDataset, scale: f64, rng: &mut RandomSource) -> SortedDataset {
    assert!(scale >= 0.0, "jitter scale must be nonnegative");
    if scale == 0.0 {
        return dataset.clone();
    }
    let mut values: Vec<f64> = dataset
        .values
        .iter()
        .map(|&v| (v + rng.uniform_in(-scale, scale)).clamp(dataset.lower, dataset.upper))
        .collect();
    values.sort_by(f64::total_cmp);
    SortedDataset { values, ..*dataset }
}

impl SortedDataset {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// `x_i` for `i` in `0..=n+1`, with `x_0 = lower` and `x_{n+1} = upper`.
    pub fn point(&self, i: usize) -> f64 {
        if i == 0 {
            self.lower
        } else if i > self.values.len() {
            self.upper
        } else {
            self.values[i - 1]
        }
    }

    /// Width of interval `i`, `x_{i+1} - x_i`.
    pub fn interval_width(&self, i: usize) -> f64 {
        self.point(i + 1) - self.point(i)
    }

    /// Number of points `x` with `lo <= x < hi`.
    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        if hi <= lo {
            return 0;
        }
        self.count_below(hi) - self.count_below(lo)
    }

    /// Number of points strictly below `v`.
    pub fn count_below(&self, v: f64) -> usize {
        self.values.partition_point(|&x| x < v)
    }
}

/// Strictly increasing target quantiles in `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileSpec {
    quantiles: Vec<f64>,
}

impl QuantileSpec {
    pub fn new(quantiles: Vec<f64>) -> Result<Self> {
        if quantiles.is_empty() {
            return Err(Error::InvalidQuantiles("at least one quantile is required".into()));
        }
        for &q in &quantiles {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::InvalidQuantiles(format!("{q} is not in (0, 1)")));
            }
        }
        for w in quantiles.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidQuantiles(format!(
                    "quantiles must be strictly increasing ({} >= {})",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { quantiles })
    }

    /// `q_j = j / (m + 1)` for `j = 1..=m`.
    pub fn evenly_spaced(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidQuantiles("m must be at least 1".into()));
        }
        Self::new((1..=m).map(|j| j as f64 / (m + 1) as f64).collect())
    }

    pub fn quantiles(&self) -> &[f64] {
        &self.quantiles
    }

    pub fn len(&self) -> usize {
        self.quantiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quantiles.is_empty()
    }

    /// Gaps `q_j - q_{j-1}` for `j = 1..=m+1`, with `q_0 = 0`, `q_{m+1} = 1`.
    pub fn gaps(&self) -> Vec<f64> {
        let mut prev = 0.0;
        let mut out = Vec::with_capacity(self.quantiles.len() + 1);
        for &q in self.quantiles.iter().chain(std::iter::once(&1.0)) {
            out.push(q - prev);
            prev = q;
        }
        out
    }

    /// Expected point counts `n_j = (q_j - q_{j-1}) n`, kept real-valued.
    pub fn gap_counts(&self, n: usize) -> Vec<f64> {
        self.gaps().into_iter().map(|g| g * n as f64).collect()
    }

    pub fn min_gap(&self) -> f64 {
        self.gaps().into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// Released quantile estimates, nondecreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileEstimates {
    outputs: Vec<f64>,
}

impl QuantileEstimates {
    /// Sorts the outputs into nondecreasing order.
    pub fn new(mut outputs: Vec<f64>) -> Self {
        outputs.sort_by(f64::total_cmp);
        Self { outputs }
    }

    pub fn values(&self) -> &[f64] {
        &self.outputs
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    /// True when every output lies in `[lower, upper]` (ordering is guaranteed
    /// by construction).
    pub fn within(&self, lower: f64, upper: f64) -> bool {
        self.outputs.iter().all(|&o| o >= lower && o <= upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sorts() {
        let d = prepare_dataset(&[3.0, 1.0, 2.0], 0.0, 4.0).unwrap();
        assert_eq!(d.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn clamps() {
        let d = prepare_dataset(&[-200.0, 0.0, 150.0], -100.0, 100.0).unwrap();
        assert_eq!(d.values(), &[-100.0, 0.0, 100.0]);
    }

    #[test]
    fn gaussian_sample_clamped_and_sorted() {
        let mut rng = RandomSource::new(11);
        let raw: Vec<f64> = (0..1000).map(|_| 5.0 * rng.normal()).collect();
        let d = prepare_dataset(&raw, -100.0, 100.0).unwrap();
        assert_eq!(d.len(), 1000);
        assert!(d.values().iter().all(|v| (-100.0..=100.0).contains(v)));
        assert!(d.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            prepare_dataset(&[1.0], 1.0, 1.0),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(
            prepare_dataset(&[1.0], 2.0, 1.0),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(prepare_dataset(&[], 0.0, 1.0), Err(Error::EmptyData)));
    }

    #[test]
    fn sentinels() {
        let d = prepare_dataset(&[1.0, 2.0, 3.0], 0.0, 4.0).unwrap();
        assert_eq!(d.point(0), 0.0);
        assert_eq!(d.point(4), 4.0);
        assert_eq!(d.interval_width(0), 1.0);
        assert_eq!(d.interval_width(3), 1.0);
        assert_eq!(d.count_in(0.0, 2.5), 2);
        assert_eq!(d.count_in(2.5, 5.0), 1);
    }

    #[test]
    fn jitter_zero_is_identity() {
        let d = prepare_dataset(&[5.0, 1.0, 5.0], 0.0, 10.0).unwrap();
        let mut rng = RandomSource::new(0);
        assert_eq!(jitter(&d, 0.0, &mut rng), d);
    }

    #[test]
    fn jitter_breaks_ties() {
        let d = prepare_dataset(&[5.0, 5.0, 5.0], 0.0, 10.0).unwrap();
        let mut rng = RandomSource::new(0);
        let j = jitter(&d, 1e-6, &mut rng);
        assert!(j.values().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn jitter_stays_in_range() {
        let d = prepare_dataset(&[0.0, 4.0], 0.0, 4.0).unwrap();
        let mut rng = RandomSource::new(5);
        for _ in 0..100 {
            let j = jitter(&d, 1.0, &mut rng);
            assert!(j.values().iter().all(|v| (0.0..=4.0).contains(v)));
        }
    }

    #[test]
    fn quantile_validation() {
        assert!(QuantileSpec::new(vec![0.5, 0.5]).is_err());
        assert!(QuantileSpec::new(vec![0.6, 0.5]).is_err());
        assert!(QuantileSpec::new(vec![0.0]).is_err());
        assert!(QuantileSpec::new(vec![1.0]).is_err());
        assert!(QuantileSpec::new(vec![]).is_err());
        let s = QuantileSpec::new(vec![0.25, 0.5]).unwrap();
        assert_eq!(s.gaps(), vec![0.25, 0.25, 0.5]);
        assert_eq!(s.gap_counts(4), vec![1.0, 1.0, 2.0]);
        assert_eq!(s.min_gap(), 0.25);
    }

    proptest! {
        #[test]
        fn prepare_is_idempotent(raw in prop::collection::vec(-500.0f64..500.0, 1..50)) {
            let once = prepare_dataset(&raw, -100.0, 100.0).unwrap();
            let twice = prepare_dataset(once.values(), -100.0, 100.0).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn gap_counts_sum_to_n(
            mut qs in prop::collection::btree_set(1u32..9999, 1..40),
            n in 1usize..100_000,
        ) {
            let quantiles: Vec<f64> = std::mem::take(&mut qs).into_iter().map(|q| q as f64 / 10_000.0).collect();
            let spec = QuantileSpec::new(quantiles).unwrap();
            let total: f64 = spec.gap_counts(n).iter().sum();
            prop_assert!((total - n as f64).abs() <= 1e-9 * n as f64);
        }
    }
}
