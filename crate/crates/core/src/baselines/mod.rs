//! Comparison estimators, plus a common front end over all four
//! algorithms.

mod aggtree;
mod composition;
mod indexp;
mod smooth;

pub use aggtree::{
    agg_tree, agg_tree_build, agg_tree_quantiles, tuned_shape, AggTree, AggTreeConfig, MAX_LEAVES,
};
pub use composition::{ddr_delta, solve_per_call_epsilon, DEFAULT_DELTA, EPSILON_STEP};
pub use indexp::{app_ind_exp, app_ind_exp_with_epsilon, ind_exp, ind_exp_log_scores};
pub use smooth::{
    calibrate_csmooth, csmooth, csmooth_params, csmooth_with_params, lln_sample, local_sensitivity_profile,
    smooth_from_profile, smooth_sensitivity, smoothing_grid, tune_csmooth, CsmoothCalibration, SmoothSensParams,
    CALIBRATION_N, CALIBRATION_RANGE, CALIBRATION_SEED, CALIBRATION_TRIALS,
};

use std::fmt;
use std::str::FromStr;

use crate::dataset::{QuantileEstimates, QuantileSpec, SortedDataset};
use crate::error::{Error, Result};
use crate::jointexp::{joint_exp, MechanismParams};
use crate::metrics::Metric;
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    JointExp,
    AppIndExp,
    CSmooth,
    AggTree,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::JointExp, Algorithm::AppIndExp, Algorithm::CSmooth, Algorithm::AggTree];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::JointExp => "jointexp",
            Algorithm::AppIndExp => "appindexp",
            Algorithm::CSmooth => "csmooth",
            Algorithm::AggTree => "aggtree",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

/// An algorithm with its data-independent setup already done, so repeated
/// calls only pay for the estimate itself.
#[derive(Debug, Clone, PartialEq)]
pub enum Estimator {
    JointExp(MechanismParams),
    AppIndExp { per_call_epsilon: f64 },
    CSmooth(Vec<SmoothSensParams>),
    AggTree(AggTreeConfig),
}

impl Estimator {
    /// Default setup of `algorithm` for `spec` at total budget `epsilon`.
    pub fn prepare(
        algorithm: Algorithm,
        spec: &QuantileSpec,
        epsilon: f64,
        metric: Metric,
        calibration: &CsmoothCalibration,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )));
        }
        Ok(match algorithm {
            Algorithm::JointExp => Estimator::JointExp(MechanismParams::swap(epsilon)?),
            Algorithm::AppIndExp => Estimator::AppIndExp {
                per_call_epsilon: solve_per_call_epsilon(spec.len(), epsilon, DEFAULT_DELTA),
            },
            Algorithm::CSmooth => Estimator::CSmooth(calibration.schedule(spec, epsilon)?),
            Algorithm::AggTree => Estimator::AggTree(AggTreeConfig::tuned(spec.len(), metric, epsilon)?),
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Estimator::JointExp(_) => Algorithm::JointExp,
            Estimator::AppIndExp { .. } => Algorithm::AppIndExp,
            Estimator::CSmooth(_) => Algorithm::CSmooth,
            Estimator::AggTree(_) => Algorithm::AggTree,
        }
    }

    pub fn estimate(
        &self,
        dataset: &SortedDataset,
        spec: &QuantileSpec,
        rng: &mut RandomSource,
    ) -> Result<QuantileEstimates> {
        match self {
            Estimator::JointExp(params) => joint_exp(dataset, spec, params, rng),
            Estimator::AppIndExp { per_call_epsilon } => app_ind_exp_with_epsilon(dataset, spec, *per_call_epsilon, rng),
            Estimator::CSmooth(params) => csmooth_with_params(dataset, spec, params, rng),
            Estimator::AggTree(config) => Ok(agg_tree(dataset, spec, config, rng)),
        }
    }
}
