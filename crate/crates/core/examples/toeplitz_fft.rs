//! Toeplitz matrix-vector products through circulant embedding, in linear
//! and log space, checked against the direct sums.

use std::time::Instant;

use dp_quantiles::numerics::{log_sum_exp, log_toeplitz_matvec, toeplitz_matvec, ToeplitzOperator};
use dp_quantiles::RandomSource;

fn main() -> dp_quantiles::Result<()> {
    let mut rng = RandomSource::new(5);

    // 3x4 by hand: rows are [1 5 6 7], [2 1 5 6], [3 2 1 5]
    let op = ToeplitzOperator::new(vec![1.0, 2.0, 3.0], vec![1.0, 5.0, 6.0, 7.0])?;
    println!("T [1 1 1 1] = {:?}", toeplitz_matvec(&op, &[1.0; 4])?);

    // log space with entries far below anything exp() can represent
    let n = 2_000;
    let col: Vec<f64> = (0..n).map(|g| -1500.0 - 0.5 * g as f64).collect();
    let mut row = col.clone();
    row.iter_mut().skip(1).for_each(|x| *x = f64::NEG_INFINITY);
    let v: Vec<f64> = (0..n).map(|_| -800.0 + 3.0 * rng.uniform()).collect();
    let op = ToeplitzOperator::new(col.clone(), row)?;

    let start = Instant::now();
    let fast = log_toeplitz_matvec(&op, &v)?;
    let t_fft = start.elapsed();

    let start = Instant::now();
    let slow: Vec<f64> = (0..n)
        .map(|i| log_sum_exp(&(0..=i).map(|j| col[i - j] + v[j]).collect::<Vec<_>>()))
        .collect();
    let t_direct = start.elapsed();

    let worst = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("lower-triangular log product, n = {n}: first {:.3}, last {:.3}", fast[0], fast[n - 1]);
    println!("max |fft - direct| = {worst:.2e}; fft {t_fft:?}, direct {t_direct:?}");
    Ok(())
}
