//! Mean error of the joint mechanism and the three baselines over a few
//! trials, for a handful of quantile counts.
//!
//! ```text
//! cargo run --release --example compare_algorithms
//! cargo run --release --example compare_algorithms -- uniform 50
//! ```

use dp_quantiles::baselines::Algorithm;
use dp_quantiles::bench::{run_experiment, summarize, DatasetKind, ExperimentConfig};

fn main() -> dp_quantiles::Result<()> {
    let mut args = std::env::args().skip(1);
    let dataset: DatasetKind = args.next().map_or(Ok(DatasetKind::Gaussian), |s| s.parse())?;
    let trials: usize = args.next().map_or(10, |s| s.parse().expect("trials"));

    let cfg = ExperimentConfig {
        algorithms: Algorithm::ALL.to_vec(),
        dataset,
        m_range: vec![1, 2, 4, 8, 16, 29],
        trials,
        seed: 7,
        ..ExperimentConfig::default()
    };
    let summary = summarize(&run_experiment(&cfg)?);

    print!("{:>4}", "m");
    for a in Algorithm::ALL {
        print!(" {:>11}", a.name());
    }
    println!("   (misclassified points per quantile, {trials} trials on {dataset})");
    for &m in &cfg.m_range {
        print!("{m:>4}");
        for a in Algorithm::ALL {
            let s = summary.iter().find(|s| s.algorithm == a && s.m == m).unwrap();
            print!(" {:>11.2}", s.misclassified_per_quantile);
        }
        println!();
    }
    Ok(())
}
