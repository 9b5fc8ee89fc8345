use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dp_quantiles::baselines::{Algorithm, CsmoothCalibration, Estimator};
use dp_quantiles::bench::{ingest_csv, records_to_csv, run_experiment, summarize, write_records_csv, ExperimentConfig};
use dp_quantiles::metrics::Metric;
use dp_quantiles::{prepare_dataset, QuantileSpec, RandomSource};

#[derive(Parser)]
#[command(name = "dpq", version, about = "Differentially private quantile estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a key=value config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `output`; without either, CSV goes to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Omit the per-(algorithm, m) summary on stderr.
        #[arg(long)]
        quiet: bool,
    },
    /// Estimate evenly spaced quantiles of one CSV column.
    Quantiles {
        #[arg(long, default_value = "jointexp")]
        algorithm: Algorithm,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "value")]
        column: String,
        #[arg(long, default_value_t = 1.0)]
        divisor: f64,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Data range as `a,b`.
        #[arg(long, allow_hyphen_values = true, default_value = "-100,100")]
        range: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the fast sampler against brute-force references on tiny inputs.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> dp_quantiles::Result<ExitCode> {
    match command {
        Command::Run { config, output, quiet } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if output.is_some() {
                cfg.output = output;
            }
            let records = run_experiment(&cfg)?;
            match &cfg.output {
                Some(path) => write_records_csv(&records, path)?,
                None => print!("{}", records_to_csv(&records)),
            }
            if !quiet {
                eprintln!("{:<10} {:>3} {:>14} {:>12} {:>12}", "algorithm", "m", "misclassified", "distance", "seconds");
                for s in summarize(&records) {
                    eprintln!(
                        "{:<10} {:>3} {:>14.3} {:>12.4} {:>12.6}",
                        s.algorithm.name(),
                        s.m,
                        s.misclassified_per_quantile,
                        s.distance_per_quantile,
                        s.wall_time_seconds
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Quantiles {
            algorithm,
            data,
            column,
            divisor,
            m,
            epsilon,
            range,
            seed,
        } => {
            let (a, b) = range
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| dp_quantiles::Error::InvalidParameter(format!("cannot parse range {range:?}")))?;
            let raw = ingest_csv(&data, &column, divisor)?;
            let dataset = prepare_dataset(&raw.values, a, b)?;
            let spec = QuantileSpec::evenly_spaced(m)?;
            let estimator =
                Estimator::prepare(algorithm, &spec, epsilon, Metric::Misclassified, &CsmoothCalibration::embedded())?;
            let estimate = estimator.estimate(&dataset, &spec, &mut RandomSource::new(seed))?;
            for v in estimate.values() {
                println!("{v}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { seed } => selftest(seed),
    }
}

#[cfg(feature = "oracle")]
fn selftest(seed: u64) -> dp_quantiles::Result<ExitCode> {
    let outcomes = dp_quantiles::oracle::self_check(seed)?;
    let mut ok = true;
    for o in &outcomes {
        println!("[{}] {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        ok &= o.passed;
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

#[cfg(not(feature = "oracle"))]
fn selftest(_seed: u64) -> dp_quantiles::Result<ExitCode> {
    eprintln!("selftest needs the `oracle` feature");
    Ok(ExitCode::from(2))
}
