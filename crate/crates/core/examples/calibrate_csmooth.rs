//! Tune the smoothing parameter of the smooth-sensitivity baseline on
//! standard normal data and print the table shipped in
//! `data/csmooth_calibration.txt`.
//!
//! ```text
//! cargo run --release --example calibrate_csmooth > data/csmooth_calibration.txt
//! cargo run --release --example calibrate_csmooth -- 2.0 10   # epsilon, max m
//! ```

use dp_quantiles::baselines::{calibrate_csmooth, CsmoothCalibration, CALIBRATION_SEED, CALIBRATION_TRIALS};
use dp_quantiles::QuantileSpec;

fn main() -> dp_quantiles::Result<()> {
    let mut args = std::env::args().skip(1);
    let epsilon: f64 = args.next().map_or(1.0, |s| s.parse().expect("epsilon"));
    let max_m: usize = args.next().map_or(29, |s| s.parse().expect("max m"));

    let mut table = CsmoothCalibration::default();
    for m in 1..=max_m {
        let spec = QuantileSpec::evenly_spaced(m)?;
        for (j, params) in calibrate_csmooth(&spec, epsilon, CALIBRATION_SEED)?.into_iter().enumerate() {
            table.insert(m, j + 1, params);
        }
        eprintln!("m = {m:2}: done");
    }
    println!("# tuned on {CALIBRATION_TRIALS} x N(0,1) n=1000 in [-100, 100], epsilon_total = {epsilon}");
    print!("{}", table.to_text());
    Ok(())
}
