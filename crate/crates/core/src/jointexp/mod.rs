//! Joint exponential mechanism for `m` quantiles.
//!
//! One exponential-mechanism draw over all nondecreasing output tuples.
//! Because the utility is constant between data points, the draw factors
//! into (1) a nondecreasing sequence of intervals between sorted points,
//! weighted by the utility term, the interval widths and `1/gamma(s)` (the
//! product of factorials of repeat counts), and (2) uniform draws inside
//! the chosen intervals. Step (1) is a forward pass over prefixes followed
//! by backward sampling, in `O(mn log n + m^2 n)` time.

mod sample;
mod table;
mod utility;

pub use sample::{backward_sample, IntervalSequence};
pub use table::{forward_pass, LogAlphaTable};
pub use utility::{log_tau, sequence_utility, utility, PhiKernel};

use crate::dataset::{QuantileEstimates, QuantileSpec, SortedDataset};
use crate::error::{Error, Result};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborModel {
    /// Neighbors differ by replacing one record; sensitivity 2.
    Swap,
    /// Neighbors differ by adding or removing one record.
    AddRemove,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismParams {
    epsilon: f64,
    sensitivity: f64,
    model: NeighborModel,
}

impl MechanismParams {
    pub fn swap(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self {
            epsilon,
            sensitivity: 2.0,
            model: NeighborModel::Swap,
        })
    }

    /// Sensitivity `2 (1 - min_j (q_j - q_{j-1}))`.
    pub fn add_remove(epsilon: f64, spec: &QuantileSpec) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self {
            epsilon,
            sensitivity: add_remove_sensitivity(spec),
            model: NeighborModel::AddRemove,
        })
    }

    pub fn new(epsilon: f64, model: NeighborModel, spec: &QuantileSpec) -> Result<Self> {
        match model {
            NeighborModel::Swap => Self::swap(epsilon),
            NeighborModel::AddRemove => Self::add_remove(epsilon, spec),
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    pub fn model(&self) -> NeighborModel {
        self.model
    }
}

pub fn add_remove_sensitivity(spec: &QuantileSpec) -> f64 {
    2.0 * (1.0 - spec.min_gap())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    Ok(())
}

/// Release `m` quantile estimates with `epsilon`-DP.
///
/// Draw order on `rng`: the backward sampler's races, then one uniform per
/// quantile for the position inside its interval.
pub fn joint_exp(
    dataset: &SortedDataset,
    spec: &QuantileSpec,
    params: &MechanismParams,
    rng: &mut RandomSource,
) -> Result<QuantileEstimates> {
    let table = forward_pass(dataset, spec, params);
    let sequence = backward_sample(&table, rng)?;
    Ok(place_in_intervals(dataset, &sequence, rng))
}

/// Uniform draw from `[x_i, x_{i+1})` for every index, sorted.
pub fn place_in_intervals(
    dataset: &SortedDataset,
    sequence: &IntervalSequence,
    rng: &mut RandomSource,
) -> QuantileEstimates {
    let outputs = sequence
        .indices()
        .iter()
        .map(|&i| rng.uniform_in(dataset.point(i), dataset.point(i + 1)))
        .collect();
    QuantileEstimates::new(outputs)
}
