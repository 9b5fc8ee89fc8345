use std::fs::File;
use std::path::Path;

use rand::seq::index;

use crate::dataset::QuantileSpec;
use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// `n` draws from `N(mean, sd^2)`.
pub fn gen_gaussian(n: usize, mean: f64, sd: f64, rng: &mut RandomSource) -> Vec<f64> {
    (0..n).map(|_| mean + sd * rng.normal()).collect()
}

/// `n` draws from `U[lo, hi)`.
pub fn gen_uniform(n: usize, lo: f64, hi: f64, rng: &mut RandomSource) -> Vec<f64> {
    (0..n).map(|_| rng.uniform_in(lo, hi)).collect()
}

/// `q_j = j / (m + 1)`.
pub fn evenly_spaced_quantiles(m: usize) -> Result<QuantileSpec> {
    QuantileSpec::evenly_spaced(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub values: Vec<f64>,
    /// Rows whose field was missing or not a finite number.
    pub skipped: usize,
}

/// Read one column of a headered CSV, dividing every value by `divisor`.
pub fn ingest_csv(path: impl AsRef<Path>, column: &str, divisor: f64) -> Result<Ingested> {
    let path = path.as_ref();
    if !(divisor.is_finite() && divisor != 0.0) {
        return Err(Error::InvalidParameter(format!("divisor must be finite and nonzero, got {divisor}")));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(file);
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let headers = reader.headers().map_err(csv_err)?.clone();
    let idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: column.to_string(),
        })?;
    let mut values = Vec::new();
    let mut skipped = 0;
    for record in reader.records() {
        let parsed = record
            .ok()
            .and_then(|r| r.get(idx).and_then(|f| f.parse::<f64>().ok()))
            .filter(|v| v.is_finite());
        match parsed {
            Some(v) => values.push(v / divisor),
            None => skipped += 1,
        }
    }
    if values.is_empty() {
        return Err(Error::NoParseableRows { path: path.to_path_buf() });
    }
    if skipped > 0 {
        log::warn!("{}: skipped {skipped} rows without a numeric {column:?}", path.display());
    }
    Ok(Ingested { values, skipped })
}

/// `n` values drawn without replacement, or the whole pool if it is not
/// larger than `n`.
pub fn subsample(pool: &[f64], n: usize, rng: &mut RandomSource) -> Vec<f64> {
    if pool.len() <= n {
        return pool.to_vec();
    }
    let mut picks = index::sample(rng, pool.len(), n).into_vec();
    picks.sort_unstable();
    picks.into_iter().map(|i| pool[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn quantile_grid() {
        assert_eq!(evenly_spaced_quantiles(1).unwrap().quantiles(), &[0.5]);
        let two = evenly_spaced_quantiles(2).unwrap();
        assert!((two.quantiles()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((two.quantiles()[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(evenly_spaced_quantiles(3).unwrap().quantiles(), &[0.25, 0.5, 0.75]);
        assert!(evenly_spaced_quantiles(0).is_err());
    }

    #[test]
    fn generators_are_seeded() {
        let a = gen_gaussian(50, 0.0, 5.0, &mut RandomSource::new(3));
        let b = gen_gaussian(50, 0.0, 5.0, &mut RandomSource::new(3));
        assert_eq!(a, b);
        let u = gen_uniform(10_000, -5.0, 5.0, &mut RandomSource::new(3));
        assert!(u.iter().all(|v| (-5.0..5.0).contains(v)));
    }

    #[test]
    fn ingest_divides_and_counts_skips() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "title,pages").unwrap();
        writeln!(f, "a,100").unwrap();
        writeln!(f, "b,250").unwrap();
        writeln!(f, "c,").unwrap();
        writeln!(f, "d,many").unwrap();
        writeln!(f, "e").unwrap();
        let got = ingest_csv(f.path(), "pages", 100.0).unwrap();
        assert_eq!(got.values, vec![1.0, 2.5]);
        assert_eq!(got.skipped, 3);
        assert!(matches!(ingest_csv(f.path(), "rating", 1.0), Err(Error::MissingColumn { .. })));
        assert!(matches!(ingest_csv("/no/such/file.csv", "pages", 1.0), Err(Error::Io { .. })));
    }

    #[test]
    fn subsample_without_replacement() {
        let pool: Vec<f64> = (0..100).map(f64::from).collect();
        let mut rng = RandomSource::new(1);
        let mut s = subsample(&pool, 30, &mut rng);
        assert_eq!(s.len(), 30);
        s.sort_by(f64::total_cmp);
        s.dedup();
        assert_eq!(s.len(), 30);
        assert_eq!(subsample(&pool, 500, &mut rng), pool);
    }
}
