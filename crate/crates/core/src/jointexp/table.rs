//! Forward pass over interval-sequence prefixes.
//!
//! `alpha(j, i, k)` is the unnormalized mass of nondecreasing length-`j`
//! prefixes that end in exactly `k` copies of interval `i`. Only the `k = 1`
//! slice is stored. The pairwise potential of a repeated interval has gap
//! zero, so it does not depend on `i`, and a run of `k` copies unrolls to
//!
//! ```text
//! ln alpha(j, i, k) = ln alpha(j-k+1, i, 1) + (k-1) ln tau(i)
//!                     + sum_{l=j-k+2..=j} ln phi(0, l) - ln k!
//! ```
//!
//! which the table evaluates on demand. Storage is `O(mn)`.

use crate::dataset::{QuantileSpec, SortedDataset};
use crate::numerics::{ln_factorial, ToeplitzMultiplier, ToeplitzOperator};

use super::utility::{log_tau, PhiKernel};
use super::MechanismParams;

#[derive(Debug, Clone)]
pub struct LogAlphaTable {
    m: usize,
    intervals: usize,
    /// `ln alpha(j, i, 1)` at `(j - 1) * intervals + i`.
    first: Vec<f64>,
    /// `ln alpha_hat(j, i) = ln sum_{k <= j} alpha(j, i, k)` at `(j - 1) * intervals + i`.
    hat: Vec<f64>,
    log_tau: Vec<f64>,
    /// `diag_prefix[j] = sum_{l=1..=j} ln phi(0, l)`.
    diag_prefix: Vec<f64>,
    ln_fact: Vec<f64>,
    kernel: PhiKernel,
}

impl LogAlphaTable {
    /// Number of quantiles `m`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of intervals, `n + 1`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn kernel(&self) -> &PhiKernel {
        &self.kernel
    }

    /// `ln alpha(j, i, k)`; `j` and `k` are 1-based. `-inf` when `k > j`.
    #[inline]
    pub fn log_alpha(&self, j: usize, i: usize, k: usize) -> f64 {
        debug_assert!(j >= 1 && j <= self.m && i < self.intervals);
        if k == 0 || k > j {
            return f64::NEG_INFINITY;
        }
        let start = j - k + 1;
        let base = self.first[(start - 1) * self.intervals + i];
        if k == 1 {
            return base;
        }
        base + (k - 1) as f64 * self.log_tau[i] + self.diag_prefix[j] - self.diag_prefix[start]
            - self.ln_fact[k]
    }

    /// `ln sum_{k <= j} alpha(j, i, k)`.
    #[inline]
    pub fn log_alpha_hat(&self, j: usize, i: usize) -> f64 {
        self.hat[(j - 1) * self.intervals + i]
    }

    /// Log of the total mass over complete sequences, i.e. the log normalizer
    /// of the interval-sequence distribution.
    pub fn log_normalizer(&self) -> f64 {
        let n = self.intervals - 1;
        let terms: Vec<f64> = (0..self.intervals)
            .flat_map(|i| {
                (1..=self.m).map(move |k| (i, k))
            })
            .map(|(i, k)| self.log_alpha(self.m, i, k) + self.kernel.log_phi((n - i) as i64, self.m + 1))
            .collect();
        crate::numerics::log_sum_exp(&terms)
    }

    fn fill_hat(&mut self, j: usize) {
        let mut terms = Vec::with_capacity(j);
        for i in 0..self.intervals {
            terms.clear();
            terms.extend((1..=j).map(|k| self.log_alpha(j, i, k)));
            self.hat[(j - 1) * self.intervals + i] = crate::numerics::log_sum_exp(&terms);
        }
    }
}

/// Build the log-domain table for `dataset` and `spec`.
///
/// The `k = 1` slice at step `j` is a strictly-lower-triangular Toeplitz
/// product `alpha(j, i, 1) = tau(i) sum_{i' < i} phi(i' -> i, j) alpha_hat(j-1, i')`,
/// evaluated with one log-space FFT matvec.
pub fn forward_pass(dataset: &SortedDataset, spec: &QuantileSpec, params: &MechanismParams) -> LogAlphaTable {
    let n = dataset.len();
    let m = spec.len();
    let intervals = n + 1;
    let kernel = PhiKernel::new(n, spec, params);
    let log_tau: Vec<f64> = (0..intervals).map(|i| log_tau(i, dataset)).collect();

    let mut diag_prefix = vec![0.0; m + 1];
    for l in 1..=m {
        diag_prefix[l] = diag_prefix[l - 1] + kernel.log_phi(0, l);
    }
    let ln_fact: Vec<f64> = (0..=m).map(ln_factorial).collect();

    let mut table = LogAlphaTable {
        m,
        intervals,
        first: vec![f64::NEG_INFINITY; m * intervals],
        hat: vec![f64::NEG_INFINITY; m * intervals],
        log_tau,
        diag_prefix,
        ln_fact,
        kernel,
    };

    for i in 0..intervals {
        table.first[i] = table.kernel.log_phi(i as i64, 1) + table.log_tau[i];
    }
    table.fill_hat(1);

    let mut multiplier = ToeplitzMultiplier::new();
    let no_row = vec![f64::NEG_INFINITY; intervals];
    for j in 2..=m {
        let prev_hat = &table.hat[(j - 2) * intervals..(j - 1) * intervals];
        let Some(first_live) = prev_hat.iter().position(|&h| h > f64::NEG_INFINITY) else {
            // no feasible prefix; everything downstream stays -inf
            table.fill_hat(j);
            continue;
        };

        let mut column = Vec::with_capacity(intervals);
        column.push(f64::NEG_INFINITY);
        column.extend((1..intervals).map(|g| table.kernel.log_phi(g as i64, j)));
        let op = ToeplitzOperator::new(column, no_row.clone()).expect("square operator");
        let product = multiplier
            .log_matvec(&op, prev_hat)
            .expect("dimensions agree by construction");

        let row = &mut table.first[(j - 1) * intervals..j * intervals];
        for (i, (slot, y)) in row.iter_mut().zip(product).enumerate() {
            // rows at or before the first live predecessor sum over nothing
            *slot = if i <= first_live {
                f64::NEG_INFINITY
            } else {
                y + table.log_tau[i]
            };
        }
        table.fill_hat(j);
    }
    table
}
