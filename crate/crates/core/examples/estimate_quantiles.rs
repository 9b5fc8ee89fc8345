//! Release the quartiles and deciles of a synthetic sample under a single
//! privacy budget, and compare with the exact order statistics.
//!
//! ```text
//! cargo run --release --example estimate_quantiles
//! cargo run --release --example estimate_quantiles -- 0.1   # smaller epsilon
//! ```

use dp_quantiles::bench::gen_gaussian;
use dp_quantiles::jointexp::{joint_exp, MechanismParams};
use dp_quantiles::metrics::{error_report, true_quantiles};
use dp_quantiles::{prepare_dataset, QuantileSpec, RandomSource};

fn main() -> dp_quantiles::Result<()> {
    let epsilon: f64 = std::env::args().nth(1).map_or(1.0, |s| s.parse().expect("epsilon"));
    let mut rng = RandomSource::new(2024);
    let raw = gen_gaussian(5_000, 50.0, 12.0, &mut rng);
    let data = prepare_dataset(&raw, 0.0, 100.0)?;

    for spec in [
        QuantileSpec::new(vec![0.25, 0.5, 0.75])?,
        QuantileSpec::new((1..10).map(|k| k as f64 / 10.0).collect())?,
    ] {
        let params = MechanismParams::swap(epsilon)?;
        let private = joint_exp(&data, &spec, &params, &mut rng)?;
        let exact = true_quantiles(&data, &spec);
        println!("{:>6} {:>10} {:>10}", "q", "exact", "private");
        for ((q, e), p) in spec.quantiles().iter().zip(exact.values()).zip(private.values()) {
            println!("{q:>6.2} {e:>10.4} {p:>10.4}");
        }
        let report = error_report(&data, &exact, &private)?;
        println!(
            "eps = {epsilon}: {:.1} points misclassified per quantile, mean distance {:.4}\n",
            report.misclassified_per_quantile, report.distance_per_quantile
        );
    }
    Ok(())
}
