//! Smooth-sensitivity quantiles with Laplace log-normal noise, composed
//! over `m` quantiles.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::dataset::{prepare_dataset, QuantileEstimates, QuantileSpec, SortedDataset};
use crate::error::{Error, Result};
use crate::metrics::nearest_rank;
use crate::rng::RandomSource;

/// Laplace log-normal noise parameters for one release at smoothing `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothSensParams {
    pub t: f64,
    pub s: f64,
    pub sigma: f64,
}

impl SmoothSensParams {
    /// Budget spent: `t / sigma + e^{1.5 sigma^2} s`.
    pub fn epsilon(&self) -> f64 {
        self.t / self.sigma + (1.5 * self.sigma * self.sigma).exp() * self.s
    }

    /// Variance factor `2 e^{5 sigma^2} / s^2` of the scaled noise.
    pub fn variance_factor(&self) -> f64 {
        2.0 * (5.0 * self.sigma * self.sigma).exp() / (self.s * self.s)
    }
}

/// `t`-smooth sensitivity of the nearest-rank `q`-quantile on `[a, b]`.
///
/// `max_k e^{-t k} A(k)` over the local-sensitivity profile of
/// [`local_sensitivity_profile`].
pub fn smooth_sensitivity(dataset: &SortedDataset, q: f64, t: f64) -> f64 {
    smooth_from_profile(&local_sensitivity_profile(dataset, q, &[t]), t)
}

/// `A(k) = max_{l=0..=k+1} (x_{r+l} - x_{r+l-k-1})` for `k = 0, 1, ...`,
/// with `x_i = a` below rank 1 and `b` above rank `n`.
///
/// The profile stops at the first `k` where `e^{-t k} (b - a)` can no
/// longer beat the running smooth maximum for any `t` in `ts`, so
/// [`smooth_from_profile`] is exact for each of them.
pub fn local_sensitivity_profile(dataset: &SortedDataset, q: f64, ts: &[f64]) -> Vec<f64> {
    let n = dataset.len() as i64;
    let r = nearest_rank(q, dataset.len()) as i64;
    let x = |i: i64| -> f64 {
        if i < 1 {
            dataset.lower()
        } else if i > n {
            dataset.upper()
        } else {
            dataset.values()[(i - 1) as usize]
        }
    };
    let span = dataset.upper() - dataset.lower();
    let mut profile = Vec::new();
    let mut best = vec![0.0f64; ts.len()];
    for k in 0..=n {
        let decay: Vec<f64> = ts.iter().map(|t| (-t * k as f64).exp()).collect();
        if k > 0 && decay.iter().zip(&best).all(|(d, b)| d * span <= *b) {
            break;
        }
        let mut local: f64 = 0.0;
        for l in 0..=k + 1 {
            local = local.max(x(r + l) - x(r + l - k - 1));
        }
        for (b, d) in best.iter_mut().zip(&decay) {
            *b = b.max(d * local);
        }
        profile.push(local);
    }
    profile
}

/// `max_k e^{-t k} profile[k]`.
pub fn smooth_from_profile(profile: &[f64], t: f64) -> f64 {
    profile
        .iter()
        .enumerate()
        .map(|(k, a)| (-t * k as f64).exp() * a)
        .fold(0.0, f64::max)
}

/// `Z = L e^{sigma Y}` with `L` standard Laplace and `Y` standard normal.
pub fn lln_sample(sigma: f64, rng: &mut RandomSource) -> f64 {
    let l = rng.laplace();
    l * (sigma * rng.normal()).exp()
}

/// Noise parameters at smoothing `t` for budget `epsilon`.
///
/// `sigma` is the positive root of `(5 eps / t) sigma^3 - 5 sigma^2 - 1 = 0`
/// and `s = e^{-1.5 sigma^2} (eps - t / sigma)`.
pub fn csmooth_params(t: f64, epsilon: f64) -> Result<SmoothSensParams> {
    if !(t > 0.0 && t.is_finite() && epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "smoothing needs positive finite t and epsilon, got t = {t}, epsilon = {epsilon}"
        )));
    }
    let f = |sigma: f64| (5.0 * epsilon / t) * sigma.powi(3) - 5.0 * sigma * sigma - 1.0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let sigma = hi;
    let slack = epsilon - t / sigma;
    if slack <= 0.0 {
        return Err(Error::InfeasibleBudget { epsilon });
    }
    Ok(SmoothSensParams {
        t,
        s: (-1.5 * sigma * sigma).exp() * slack,
        sigma,
    })
}

/// The smoothing grid: 50 log-spaced values in `[0.01, 1]`.
pub fn smoothing_grid() -> Vec<f64> {
    (0..50)
        .map(|k| 10f64.powf(-2.0 + 2.0 * k as f64 / 49.0))
        .collect()
}

/// The `t` on [`smoothing_grid`] minimizing the noise variance
/// `2 S_t^2 e^{5 sigma^2} / s^2` on `dataset`.
pub fn tune_csmooth(dataset: &SortedDataset, q: f64, epsilon: f64) -> Result<SmoothSensParams> {
    let grid = smoothing_grid();
    let profile = local_sensitivity_profile(dataset, q, &grid);
    let mut best: Option<(f64, SmoothSensParams)> = None;
    for t in grid {
        let Ok(p) = csmooth_params(t, epsilon) else {
            continue;
        };
        let sens = smooth_from_profile(&profile, t);
        let var = sens * sens * p.variance_factor();
        if best.is_none_or(|(v, _)| var < v) {
            best = Some((var, p));
        }
    }
    best.map(|(_, p)| p).ok_or(Error::InfeasibleBudget { epsilon })
}

pub const CALIBRATION_N: usize = 1000;
pub const CALIBRATION_TRIALS: usize = 5;
pub const CALIBRATION_RANGE: (f64, f64) = (-100.0, 100.0);
pub const CALIBRATION_SEED: u64 = 0x005e_edc5;

/// Per-quantile `t` averaged over [`CALIBRATION_TRIALS`] standard normal
/// datasets of size [`CALIBRATION_N`], at per-release budget
/// `epsilon_total / sqrt(m)`.
pub fn calibrate_csmooth(spec: &QuantileSpec, epsilon_total: f64, seed: u64) -> Result<Vec<SmoothSensParams>> {
    let per_call = epsilon_total / (spec.len() as f64).sqrt();
    let mut sums = vec![0.0; spec.len()];
    for trial in 0..CALIBRATION_TRIALS {
        let mut rng = RandomSource::for_trial(seed, trial as u64);
        let raw: Vec<f64> = (0..CALIBRATION_N).map(|_| rng.normal()).collect();
        let data = prepare_dataset(&raw, CALIBRATION_RANGE.0, CALIBRATION_RANGE.1)?;
        for (j, &q) in spec.quantiles().iter().enumerate() {
            sums[j] += tune_csmooth(&data, q, per_call)?.t;
        }
    }
    sums.iter()
        .map(|s| csmooth_params(s / CALIBRATION_TRIALS as f64, per_call))
        .collect()
}

/// Tuned `t` per `(m, j)` for evenly spaced quantiles, as text rows
/// `m j t s sigma`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsmoothCalibration {
    rows: BTreeMap<(usize, usize), SmoothSensParams>,
}

const EMBEDDED_CALIBRATION: &str = include_str!("../../data/csmooth_calibration.txt");

impl CsmoothCalibration {
    /// The table shipped with the crate.
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_CALIBRATION).expect("embedded calibration table is well formed")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |message: String| Error::Calibration {
                line: idx + 1,
                message,
            };
            if fields.len() != 5 {
                return Err(bad(format!("expected 5 fields, found {}", fields.len())));
            }
            let m: usize = fields[0].parse().map_err(|e| bad(format!("m: {e}")))?;
            let j: usize = fields[1].parse().map_err(|e| bad(format!("j: {e}")))?;
            let mut nums = [0.0f64; 3];
            for (slot, f) in nums.iter_mut().zip(&fields[2..]) {
                *slot = f.parse().map_err(|e| bad(format!("{f}: {e}")))?;
            }
            if j == 0 || j > m {
                return Err(bad(format!("quantile index {j} outside 1..={m}")));
            }
            if nums.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(bad("t, s and sigma must be positive".into()));
            }
            rows.insert(
                (m, j),
                SmoothSensParams {
                    t: nums[0],
                    s: nums[1],
                    sigma: nums[2],
                },
            );
        }
        Ok(Self { rows })
    }

    pub fn insert(&mut self, m: usize, j: usize, params: SmoothSensParams) {
        self.rows.insert((m, j), params);
    }

    /// Row for 1-based quantile `j` of `m`.
    pub fn get(&self, m: usize, j: usize) -> Option<SmoothSensParams> {
        self.rows.get(&(m, j)).copied()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# m j t s sigma\n");
        for (&(m, j), p) in &self.rows {
            writeln!(out, "{m} {j} {:.17e} {:.17e} {:.17e}", p.t, p.s, p.sigma).unwrap();
        }
        out
    }

    /// Noise parameters for every quantile in `spec` at total budget
    /// `epsilon_total`.
    ///
    /// Stored `t` values are reused for evenly spaced specs; `sigma` and
    /// `s` are always re-derived for the per-release budget. Anything not
    /// in the table is tuned on the spot with the fixed calibration seed.
    pub fn schedule(&self, spec: &QuantileSpec, epsilon_total: f64) -> Result<Vec<SmoothSensParams>> {
        let m = spec.len();
        let per_call = epsilon_total / (m as f64).sqrt();
        let stored: Option<Vec<f64>> = if is_evenly_spaced(spec) {
            (1..=m).map(|j| self.get(m, j).map(|p| p.t)).collect()
        } else {
            None
        };
        match stored {
            Some(ts) => ts.into_iter().map(|t| csmooth_params(t, per_call)).collect(),
            None => calibrate_csmooth(spec, epsilon_total, CALIBRATION_SEED),
        }
    }
}

fn is_evenly_spaced(spec: &QuantileSpec) -> bool {
    let m = spec.len() as f64;
    spec.quantiles()
        .iter()
        .enumerate()
        .all(|(j, &q)| (q - (j as f64 + 1.0) / (m + 1.0)).abs() < 1e-12)
}

/// One smooth-sensitivity release per quantile, clipped to the data range.
///
/// Draw order: for each quantile in turn, one Laplace and one normal draw.
pub fn csmooth_with_params(
    dataset: &SortedDataset,
    spec: &QuantileSpec,
    params: &[SmoothSensParams],
    rng: &mut RandomSource,
) -> Result<QuantileEstimates> {
    if params.len() != spec.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            actual: params.len(),
        });
    }
    let n = dataset.len();
    let outputs = spec
        .quantiles()
        .iter()
        .zip(params)
        .map(|(&q, p)| {
            let centre = dataset.values()[nearest_rank(q, n) - 1];
            let scale = smooth_sensitivity(dataset, q, p.t) / p.s;
            (centre + scale * lln_sample(p.sigma, rng)).clamp(dataset.lower(), dataset.upper())
        })
        .collect();
    Ok(QuantileEstimates::new(outputs))
}

/// `epsilon_total`-zCDP overall via `epsilon_total / sqrt(m)` per release.
pub fn csmooth(
    dataset: &SortedDataset,
    spec: &QuantileSpec,
    epsilon_total: f64,
    calibration: &CsmoothCalibration,
    rng: &mut RandomSource,
) -> Result<QuantileEstimates> {
    let params = calibration.schedule(spec, epsilon_total)?;
    csmooth_with_params(dataset, spec, &params, rng)
}
