use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{DatasetKind, ExperimentConfig};
use super::data::{evenly_spaced_quantiles, gen_gaussian, gen_uniform, ingest_csv, subsample};
use crate::baselines::{AggTreeConfig, Algorithm, CsmoothCalibration, Estimator};
use crate::dataset::{jitter, prepare_dataset};
use crate::error::{Error, Result};
use crate::metrics::{error_report, true_quantiles};
use crate::rng::RandomSource;

pub const CSV_HEADER: &str =
    "algorithm,dataset,n,m,epsilon,trial,misclassified_per_quantile,distance_per_quantile,wall_time_seconds";

/// One algorithm on one trial at one `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub algorithm: Algorithm,
    pub dataset: DatasetKind,
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    pub trial: usize,
    pub misclassified_per_quantile: f64,
    pub distance_per_quantile: f64,
    pub wall_time_seconds: f64,
}

impl ExperimentRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.algorithm,
            self.dataset,
            self.n,
            self.m,
            format_sig(self.epsilon),
            self.trial,
            format_sig(self.misclassified_per_quantile),
            format_sig(self.distance_per_quantile),
            format_sig(self.wall_time_seconds),
        )
    }
}

/// `%.9g`: nine significant digits, trailing zeros dropped, exponent form
/// below `1e-5` or from `1e9` up.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-5..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Stream used for the data of trial `trial` at `m` quantiles.
fn data_stream(m: usize) -> u64 {
    m as u64
}

/// Stream every algorithm starts from at `m` quantiles. Sharing it gives
/// paired comparisons (common random numbers): at `m = 1` the joint and
/// independent mechanisms coincide and consume draws identically, so they
/// return identical estimates.
fn algorithm_stream(m: usize) -> u64 {
    (1 << 32) | m as u64
}

fn prepare_estimator(
    config: &ExperimentConfig,
    algorithm: Algorithm,
    m: usize,
    calibration: &CsmoothCalibration,
) -> Result<Estimator> {
    let spec = evenly_spaced_quantiles(m)?;
    if algorithm == Algorithm::AggTree && (config.branching.is_some() || config.height.is_some()) {
        let (height, branching) = crate::baselines::tuned_shape(m, config.metric);
        let tree = AggTreeConfig::new(
            config.branching.unwrap_or(branching),
            config.height.unwrap_or(height),
            config.epsilon,
        )?;
        return Ok(Estimator::AggTree(tree));
    }
    Estimator::prepare(algorithm, &spec, config.epsilon, config.metric, calibration)
}

/// Run every `(m, trial)` pair, one record per algorithm, ordered by `m`,
/// then trial, then the config's algorithm order.
///
/// Trial `i` seeds its generators with `seed + i`. The data has its own
/// stream and each algorithm restarts a second, shared one, so adding or
/// removing an algorithm leaves every other number unchanged. Wall time
/// covers only the estimate call; with `timing = false` it is written as 0
/// and the output is a pure function of the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let pool = match config.dataset {
        DatasetKind::Gaussian | DatasetKind::Uniform => None,
        kind => {
            let (column, divisor) = match kind.default_column() {
                Some((c, d)) => (config.column.clone().unwrap_or(c.into()), config.divisor.unwrap_or(d)),
                None => (config.column.clone().unwrap_or_default(), config.divisor.unwrap_or(1.0)),
            };
            let path = config.path.as_ref().expect("validated");
            Some(ingest_csv(path, &column, divisor)?.values)
        }
    };
    let calibration = CsmoothCalibration::embedded();
    let mut estimators: BTreeMap<(usize, usize), Estimator> = BTreeMap::new();
    for &m in &config.m_range {
        for (k, &a) in config.algorithms.iter().enumerate() {
            estimators.insert((m, k), prepare_estimator(config, a, m, &calibration)?);
        }
    }

    let jobs: Vec<(usize, usize)> = config
        .m_range
        .iter()
        .flat_map(|&m| (0..config.trials).map(move |t| (m, t)))
        .collect();
    let per_job: Vec<Result<Vec<ExperimentRecord>>> = jobs
        .par_iter()
        .map(|&(m, trial)| run_trial(config, pool.as_deref(), &estimators, m, trial))
        .collect();
    let mut out = Vec::with_capacity(jobs.len() * config.algorithms.len());
    for records in per_job {
        out.extend(records?);
    }
    Ok(out)
}

fn run_trial(
    config: &ExperimentConfig,
    pool: Option<&[f64]>,
    estimators: &BTreeMap<(usize, usize), Estimator>,
    m: usize,
    trial: usize,
) -> Result<Vec<ExperimentRecord>> {
    let trial_seed = config.seed.wrapping_add(trial as u64);
    let mut data_rng = RandomSource::with_stream(trial_seed, data_stream(m));
    let raw = match (config.dataset, pool) {
        (DatasetKind::Gaussian, _) => gen_gaussian(config.n, 0.0, 5.0, &mut data_rng),
        (DatasetKind::Uniform, _) => gen_uniform(config.n, -5.0, 5.0, &mut data_rng),
        (_, Some(pool)) => subsample(pool, config.n, &mut data_rng),
        (_, None) => unreachable!("file datasets load a pool"),
    };
    let (a, b) = config.data_range;
    let mut dataset = prepare_dataset(&raw, a, b)?;
    if let Some(scale) = config.jitter {
        dataset = jitter(&dataset, scale, &mut data_rng);
    }
    let spec = evenly_spaced_quantiles(m)?;
    let truth = true_quantiles(&dataset, &spec);

    let mut records = Vec::with_capacity(config.algorithms.len());
    for (k, &algorithm) in config.algorithms.iter().enumerate() {
        let estimator = &estimators[&(m, k)];
        let mut rng = RandomSource::with_stream(trial_seed, algorithm_stream(m));
        let start = Instant::now();
        let estimate = estimator.estimate(&dataset, &spec, &mut rng)?;
        let elapsed = start.elapsed().as_secs_f64();
        let report = error_report(&dataset, &truth, &estimate)?;
        records.push(ExperimentRecord {
            algorithm,
            dataset: config.dataset,
            n: dataset.len(),
            m,
            epsilon: config.epsilon,
            trial,
            misclassified_per_quantile: report.misclassified_per_quantile,
            distance_per_quantile: report.distance_per_quantile,
            wall_time_seconds: if config.timing { elapsed } else { 0.0 },
        });
    }
    Ok(records)
}

pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

/// Write through a sibling temporary file and rename it into place.
pub fn write_records_csv(records: &[ExperimentRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(records_to_csv(records).as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// Means over trials for one algorithm at one `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub algorithm: Algorithm,
    pub m: usize,
    pub trials: usize,
    pub misclassified_per_quantile: f64,
    pub distance_per_quantile: f64,
    pub wall_time_seconds: f64,
}

/// Per `(algorithm, m)` means, sorted by algorithm then `m`.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<Summary> {
    let mut groups: BTreeMap<(Algorithm, usize), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.algorithm, r.m)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((algorithm, m), rs)| {
            let k = rs.len() as f64;
            Summary {
                algorithm,
                m,
                trials: rs.len(),
                misclassified_per_quantile: rs.iter().map(|r| r.misclassified_per_quantile).sum::<f64>() / k,
                distance_per_quantile: rs.iter().map(|r| r.distance_per_quantile).sum::<f64>() / k,
                wall_time_seconds: rs.iter().map(|r| r.wall_time_seconds).sum::<f64>() / k,
            }
        })
        .collect()
}
