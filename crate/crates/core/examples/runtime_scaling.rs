//! Wall time of the joint mechanism as `n` grows.
//!
//! ```text
//! cargo run --release --example runtime_scaling            # n = 1e3 .. 1e5, m = 30
//! cargo run --release --example runtime_scaling -- 1000000 # add larger sizes
//! ```

use std::time::Instant;

use dp_quantiles::bench::gen_gaussian;
use dp_quantiles::jointexp::{backward_sample, forward_pass, place_in_intervals, MechanismParams};
use dp_quantiles::{prepare_dataset, QuantileSpec, RandomSource};

fn main() -> dp_quantiles::Result<()> {
    let mut sizes = vec![1_000, 10_000, 100_000];
    sizes.extend(std::env::args().skip(1).map(|s| s.parse::<usize>().expect("size")));
    let m = 30;
    let spec = QuantileSpec::evenly_spaced(m)?;
    let params = MechanismParams::swap(1.0)?;
    let mut rng = RandomSource::new(11);

    println!("{:>9} {:>12} {:>12} {:>12}", "n", "forward s", "backward s", "total s");
    for n in sizes {
        let raw = gen_gaussian(n, 0.0, 5.0, &mut rng);
        let data = prepare_dataset(&raw, -100.0, 100.0)?;
        let start = Instant::now();
        let table = forward_pass(&data, &spec, &params);
        let forward = start.elapsed().as_secs_f64();
        let sequence = backward_sample(&table, &mut rng)?;
        let estimate = place_in_intervals(&data, &sequence, &mut rng);
        let total = start.elapsed().as_secs_f64();
        assert_eq!(estimate.len(), m);
        println!("{n:>9} {forward:>12.4} {:>12.4} {total:>12.4}", total - forward);
    }
    Ok(())
}
