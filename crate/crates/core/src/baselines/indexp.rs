use crate::dataset::{QuantileEstimates, QuantileSpec, SortedDataset};
use crate::error::Result;
use crate::numerics::racing_sample;
use crate::rng::RandomSource;

use super::composition::{solve_per_call_epsilon, DEFAULT_DELTA};

/// Single-quantile exponential mechanism over the intervals between the
/// points of `X ∪ {a, b}`.
///
/// Interval `j` is `[z_j, z_{j+1})` with score `exp(-eps |j - qn| / 2) |I_j|`;
/// the rank utility has sensitivity 1. Draw order: one race over the
/// `n + 1` intervals, then one uniform for the position.
pub fn ind_exp(dataset: &SortedDataset, q: f64, epsilon: f64, rng: &mut RandomSource) -> Result<f64> {
    let log_scores = ind_exp_log_scores(dataset, q, epsilon);
    let j = racing_sample(&log_scores, rng)?;
    Ok(rng.uniform_in(dataset.point(j), dataset.point(j + 1)))
}

/// Unnormalized log-scores for every interval.
pub fn ind_exp_log_scores(dataset: &SortedDataset, q: f64, epsilon: f64) -> Vec<f64> {
    let target = q * dataset.len() as f64;
    (0..=dataset.len())
        .map(|j| -epsilon * (j as f64 - target).abs() / 2.0 + dataset.interval_width(j).ln())
        .collect()
}

/// `m` independent [`ind_exp`] calls at a fixed per-call budget.
pub fn app_ind_exp_with_epsilon(
    dataset: &SortedDataset,
    spec: &QuantileSpec,
    per_call_epsilon: f64,
    rng: &mut RandomSource,
) -> Result<QuantileEstimates> {
    let outputs = spec
        .quantiles()
        .iter()
        .map(|&q| ind_exp(dataset, q, per_call_epsilon, rng))
        .collect::<Result<Vec<f64>>>()?;
    Ok(QuantileEstimates::new(outputs))
}

/// `(eps_g, 1e-6)`-DP overall, splitting the budget with the nonadaptive
/// exponential-mechanism composition bound.
pub fn app_ind_exp(
    dataset: &SortedDataset,
    spec: &QuantileSpec,
    epsilon_total: f64,
    rng: &mut RandomSource,
) -> Result<QuantileEstimates> {
    let per_call = solve_per_call_epsilon(spec.len(), epsilon_total, DEFAULT_DELTA);
    app_ind_exp_with_epsilon(dataset, spec, per_call, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::prepare_dataset;
    use crate::numerics::log_sum_exp;

    #[test]
    fn concentrates_on_the_middle_rank_intervals() {
        let d = prepare_dataset(&[1.0, 2.0, 3.0], 0.0, 4.0).unwrap();
        // qn = 1.5: intervals 1 = [1, 2) and 2 = [2, 3) tie for the best rank
        let lw = ind_exp_log_scores(&d, 0.5, 60.0);
        let z = log_sum_exp(&lw);
        let middle = (lw[1] - z).exp() + (lw[2] - z).exp();
        assert!(middle > 1.0 - 1e-12);
        let mut rng = RandomSource::new(0);
        for _ in 0..1000 {
            let o = ind_exp(&d, 0.5, 60.0, &mut rng).unwrap();
            assert!((1.0..3.0).contains(&o));
        }
    }

    #[test]
    fn zero_width_interval_never_chosen() {
        let d = prepare_dataset(&[1.0, 2.0, 2.0, 3.0], 0.0, 4.0).unwrap();
        assert_eq!(ind_exp_log_scores(&d, 0.5, 1.0)[2], f64::NEG_INFINITY);
    }

    #[test]
    fn symmetric_intervals_equal_scores() {
        let d = prepare_dataset(&[1.0, 2.0, 3.0], 0.0, 4.0).unwrap();
        let lw = ind_exp_log_scores(&d, 0.5, 1.0);
        assert_eq!(lw[1], lw[2]);
        assert_eq!(lw[0], lw[3]);
    }

    #[test]
    fn outputs_in_range() {
        let mut rng = RandomSource::new(5);
        let raw: Vec<f64> = (0..300).map(|_| rng.normal()).collect();
        let d = prepare_dataset(&raw, -3.0, 3.0).unwrap();
        let spec = QuantileSpec::evenly_spaced(7).unwrap();
        for _ in 0..20 {
            let est = app_ind_exp(&d, &spec, 1.0, &mut rng).unwrap();
            assert!(est.within(-3.0, 3.0));
            assert_eq!(est.len(), 7);
        }
    }
}
