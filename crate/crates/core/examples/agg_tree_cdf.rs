//! Build the noisy hierarchical histogram once and read several quantile
//! sets from it; the budget is spent on the tree, not per query.

use dp_quantiles::baselines::{agg_tree_build, agg_tree_quantiles, AggTreeConfig};
use dp_quantiles::bench::gen_uniform;
use dp_quantiles::metrics::true_quantiles;
use dp_quantiles::{prepare_dataset, QuantileSpec, RandomSource};

fn main() -> dp_quantiles::Result<()> {
    let mut rng = RandomSource::new(9);
    let data = prepare_dataset(&gen_uniform(2_000, -5.0, 5.0, &mut rng), -100.0, 100.0)?;
    let config = AggTreeConfig::new(10, 3, 1.0)?;
    let tree = agg_tree_build(&data, &config, &mut rng);
    println!("{} leaves of width {}", config.leaves(), tree.bucket_width());

    let cdf = tree.cdf();
    let mid = config.leaves() / 2;
    println!("noisy CDF around 0: {:?}", cdf[mid - 3..=mid + 3].iter().map(|c| c.round()).collect::<Vec<_>>());

    for m in [1, 3, 9] {
        let spec = QuantileSpec::evenly_spaced(m)?;
        let est = agg_tree_quantiles(&tree, &spec);
        let exact = true_quantiles(&data, &spec);
        println!("m = {m}: estimate {:?}", est.values().iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>());
        println!("       exact    {:?}", exact.values().iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>());
    }
    Ok(())
}
