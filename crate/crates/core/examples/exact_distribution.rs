//! Enumerate the mechanism's exact law over interval sequences on a tiny
//! dataset and put it next to sampled frequencies.

use dp_quantiles::jointexp::{backward_sample, forward_pass, sequence_utility, MechanismParams};
use dp_quantiles::oracle::enumerate_distribution;
use dp_quantiles::{prepare_dataset, QuantileSpec, RandomSource};

fn main() -> dp_quantiles::Result<()> {
    let data = prepare_dataset(&[1.0, 2.0, 4.0, 7.0], 0.0, 10.0)?;
    let spec = QuantileSpec::new(vec![0.3, 0.7])?;
    let params = MechanismParams::swap(2.0)?;

    let exact = enumerate_distribution(&data, &spec, &params)?;
    let index = exact.index();
    let table = forward_pass(&data, &spec, &params);
    println!("log Z: enumeration {:.12}, forward pass {:.12}", exact.log_z, table.log_normalizer());

    let draws = 200_000;
    let mut counts = vec![0usize; exact.support.len()];
    let mut rng = RandomSource::new(1);
    for _ in 0..draws {
        counts[index[backward_sample(&table, &mut rng)?.indices()]] += 1;
    }

    println!("{:>10} {:>8} {:>10} {:>10}", "intervals", "utility", "exact", "sampled");
    let mut tv = 0.0;
    for (k, s) in exact.support.iter().enumerate() {
        let p = exact.probability(k);
        let f = counts[k] as f64 / draws as f64;
        tv += (p - f).abs() / 2.0;
        if p > 1e-3 {
            let u = sequence_utility(data.len(), &spec, s.indices());
            println!("{:>10} {u:>8.1} {p:>10.5} {f:>10.5}", format!("{:?}", s.indices()));
        }
    }
    println!("total variation over {} sequences: {tv:.4}", exact.support.len());
    Ok(())
}
