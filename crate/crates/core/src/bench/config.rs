use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::baselines::Algorithm;
use crate::error::{Error, Result};
use crate::metrics::Metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    /// `N(0, 5^2)`.
    Gaussian,
    /// `U[-5, 5)`.
    Uniform,
    /// Book ratings: column `rating`, used as is.
    Ratings,
    /// Book page counts: column `pages`, divided by 100.
    PageCounts,
    /// Any column of any CSV.
    File,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Gaussian => "gaussian",
            DatasetKind::Uniform => "uniform",
            DatasetKind::Ratings => "ratings",
            DatasetKind::PageCounts => "pagecounts",
            DatasetKind::File => "file",
        }
    }

    pub fn is_synthetic(self) -> bool {
        matches!(self, DatasetKind::Gaussian | DatasetKind::Uniform)
    }

    /// Column and divisor used when the config leaves them out.
    pub fn default_column(self) -> Option<(&'static str, f64)> {
        match self {
            DatasetKind::Ratings => Some(("rating", 1.0)),
            DatasetKind::PageCounts => Some(("pages", 100.0)),
            _ => None,
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            DatasetKind::Gaussian,
            DatasetKind::Uniform,
            DatasetKind::Ratings,
            DatasetKind::PageCounts,
            DatasetKind::File,
        ]
        .into_iter()
        .find(|d| d.name() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown dataset {s:?}")))
    }
}

/// Everything that determines an experiment's output.
///
/// Text form is one `key = value` per line with `#` comments:
///
/// ```text
/// algorithm = jointexp, appindexp   # one or more
/// dataset   = gaussian              # gaussian | uniform | ratings | pagecounts | file
/// path      = books.csv             # for ratings, pagecounts and file
/// column    = pages                 # file only, or to override the default
/// divisor   = 100
/// n         = 1000
/// m_range   = 1-10, 15, 20
/// epsilon   = 1
/// trials    = 20
/// seed      = 42
/// data_range = -100, 100
/// metric    = misclassified         # or distance; picks the tree shape
/// jitter    = 0.001
/// branching = 10                    # overrides the tuned tree shape
/// height    = 3
/// timing    = true                  # false writes 0 wall time
/// output    = results.csv
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    pub dataset: DatasetKind,
    pub path: Option<PathBuf>,
    pub column: Option<String>,
    pub divisor: Option<f64>,
    pub n: usize,
    pub m_range: Vec<usize>,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub data_range: (f64, f64),
    pub metric: Metric,
    pub jitter: Option<f64>,
    pub branching: Option<usize>,
    pub height: Option<usize>,
    pub timing: bool,
    pub output: Option<PathBuf>,
}

pub const DEFAULT_TRIALS: usize = 20;
pub const FIGURE_TRIALS: usize = 50;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            algorithms: vec![Algorithm::JointExp],
            dataset: DatasetKind::Gaussian,
            path: None,
            column: None,
            divisor: None,
            n: 1000,
            m_range: (1..=29).collect(),
            epsilon: 1.0,
            trials: DEFAULT_TRIALS,
            seed: 0,
            data_range: (-100.0, 100.0),
            metric: Metric::Misclassified,
            jitter: None,
            branching: None,
            height: None,
            timing: true,
            output: None,
        }
    }
}

impl ExperimentConfig {
    /// All four algorithms, `m = 1..=29`, 50 trials of 1000 points at
    /// `eps = 1` on `[-100, 100]`.
    pub fn figure_preset(dataset: DatasetKind) -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            dataset,
            trials: FIGURE_TRIALS,
            ..Self::default()
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Config { line: idx + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |what: &str| bad(format!("{key}: cannot parse {value:?} as {what}"));
            match key {
                "algorithm" | "algorithms" => {
                    cfg.algorithms = value
                        .split(',')
                        .map(|a| a.trim().parse::<Algorithm>())
                        .collect::<Result<_>>()
                        .map_err(|e| bad(e.to_string()))?;
                }
                "dataset" => cfg.dataset = value.parse().map_err(|e: Error| bad(e.to_string()))?,
                "path" => cfg.path = Some(PathBuf::from(value)),
                "column" => cfg.column = Some(value.to_string()),
                "divisor" => cfg.divisor = Some(value.parse().map_err(|_| num("a number"))?),
                "n" => cfg.n = value.parse().map_err(|_| num("a count"))?,
                "m" | "m_range" => cfg.m_range = parse_range_list(value).map_err(bad)?,
                "epsilon" => cfg.epsilon = value.parse().map_err(|_| num("a number"))?,
                "trials" => cfg.trials = value.parse().map_err(|_| num("a count"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| num("a 64-bit seed"))?,
                "data_range" | "range" => cfg.data_range = parse_pair(value).ok_or_else(|| num("a, b"))?,
                "metric" => cfg.metric = value.parse().map_err(|e: Error| bad(e.to_string()))?,
                "jitter" => cfg.jitter = Some(value.parse().map_err(|_| num("a number"))?),
                "branching" => cfg.branching = Some(value.parse().map_err(|_| num("a count"))?),
                "height" => cfg.height = Some(value.parse().map_err(|_| num("a count"))?),
                "timing" => cfg.timing = value.parse().map_err(|_| num("true or false"))?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parse a config file, resolving relative `path` and `output` against
    /// the file's directory.
    pub fn from_file(file: impl AsRef<Path>) -> Result<Self> {
        let file = file.as_ref();
        let text = std::fs::read_to_string(file).map_err(|e| Error::io(file, e))?;
        let mut cfg = Self::parse(&text)?;
        let base = file.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.path, &mut cfg.output].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config { line: 0, message: m });
        if self.algorithms.is_empty() {
            return fail("at least one algorithm is required".into());
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.n == 0 {
            return fail("n must be at least 1".into());
        }
        if self.m_range.is_empty() || self.m_range.contains(&0) {
            return fail("m_range entries must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return fail(format!("epsilon must be positive, got {}", self.epsilon));
        }
        let (a, b) = self.data_range;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return fail(format!("data_range needs a < b, got {a}, {b}"));
        }
        if !self.dataset.is_synthetic() && self.path.is_none() {
            return fail(format!("dataset {} needs a path", self.dataset));
        }
        if self.dataset == DatasetKind::File && self.column.is_none() {
            return fail("dataset file needs a column".into());
        }
        if self.jitter.is_some_and(|j| !(j >= 0.0 && j.is_finite())) {
            return fail("jitter must be a nonnegative number".into());
        }
        Ok(())
    }
}

/// `"1-5, 8, 10-12"` into `[1, 2, 3, 4, 5, 8, 10, 11, 12]`.
fn parse_range_list(value: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || format!("cannot parse {part:?} as a count or range");
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

fn parse_pair(value: &str) -> Option<(f64, f64)> {
    let (a, b) = value.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}
