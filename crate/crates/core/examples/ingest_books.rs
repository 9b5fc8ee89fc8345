//! Load a column of a book catalogue CSV and release its quantiles with
//! each algorithm. Defaults to the bundled synthetic fixture.
//!
//! ```text
//! cargo run --release --example ingest_books
//! cargo run --release --example ingest_books -- books.csv num_pages 100
//! ```

use dp_quantiles::baselines::{Algorithm, CsmoothCalibration, Estimator};
use dp_quantiles::bench::{ingest_csv, subsample};
use dp_quantiles::metrics::{error_report, true_quantiles, Metric};
use dp_quantiles::{prepare_dataset, QuantileSpec, RandomSource};

fn main() -> dp_quantiles::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/goodreads_fixture.csv").into());
    let column = args.next().unwrap_or_else(|| "pages".into());
    let divisor: f64 = args.next().map_or(100.0, |s| s.parse().expect("divisor"));

    let pool = ingest_csv(&path, &column, divisor)?;
    println!("{path}: {} values in {column:?}, {} rows skipped", pool.values.len(), pool.skipped);

    let mut rng = RandomSource::new(3);
    let data = prepare_dataset(&subsample(&pool.values, 1000, &mut rng), -100.0, 100.0)?;
    let spec = QuantileSpec::evenly_spaced(9)?;
    let exact = true_quantiles(&data, &spec);
    let calibration = CsmoothCalibration::embedded();
    println!("{:>10}: {:?}", "exact", exact.values());
    for algorithm in Algorithm::ALL {
        let est = Estimator::prepare(algorithm, &spec, 1.0, Metric::Misclassified, &calibration)?;
        let out = est.estimate(&data, &spec, &mut rng)?;
        let report = error_report(&data, &exact, &out)?;
        let shown: Vec<String> = out.values().iter().map(|v| format!("{v:.2}")).collect();
        println!("{:>10}: [{}]  {:.1} misclassified/quantile", algorithm.name(), shown.join(", "), report.misclassified_per_quantile);
    }
    Ok(())
}
