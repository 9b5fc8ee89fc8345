//! Toeplitz matrix-vector products through circulant embedding.
//!
//! An `r x c` Toeplitz matrix is embedded in a circulant of size
//! `N = next_pow2(r + c - 1)`; the product is then one forward FFT of the
//! kernel, one of the zero-padded vector, a pointwise product and an inverse
//! FFT, for `O((r + c) log(r + c))` work.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// `T[i][j] = first_column[i - j]` for `i >= j`, else `first_row[j - i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzOperator {
    first_column: Vec<f64>,
    first_row: Vec<f64>,
}

impl ToeplitzOperator {
    pub fn new(first_column: Vec<f64>, first_row: Vec<f64>) -> Result<Self> {
        if first_column.is_empty() || first_row.is_empty() {
            return Err(Error::InvalidParameter(
                "Toeplitz operator needs a nonempty first row and column".into(),
            ));
        }
        let (c0, r0) = (first_column[0], first_row[0]);
        if c0 != r0 && !(c0.is_nan() && r0.is_nan()) {
            return Err(Error::InvalidParameter(format!(
                "first_column[0] = {c0} differs from first_row[0] = {r0}"
            )));
        }
        Ok(Self {
            first_column,
            first_row,
        })
    }

    pub fn rows(&self) -> usize {
        self.first_column.len()
    }

    pub fn cols(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_column(&self) -> &[f64] {
        &self.first_column
    }

    pub fn first_row(&self) -> &[f64] {
        &self.first_row
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= j {
            self.first_column[i - j]
        } else {
            self.first_row[j - i]
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.cols(),
                actual: len,
            });
        }
        Ok(())
    }
}

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

/// FFT plans reused across products of the same size.
pub struct ToeplitzMultiplier {
    planner: FftPlanner<f64>,
    cached: Option<(usize, PlanPair)>,
}

impl Default for ToeplitzMultiplier {
    fn default() -> Self {
        Self::new()
    }
}

impl ToeplitzMultiplier {
    pub fn new() -> Self {
        Self {
            planner: FftPlanner::new(),
            cached: None,
        }
    }

    fn plans(&mut self, len: usize) -> PlanPair {
        match &self.cached {
            Some((n, plans)) if *n == len => plans.clone(),
            _ => {
                let plans = (self.planner.plan_fft_forward(len), self.planner.plan_fft_inverse(len));
                self.cached = Some((len, plans.clone()));
                plans
            }
        }
    }

    /// `T v` for nonnegative or signed real inputs.
    pub fn matvec(&mut self, op: &ToeplitzOperator, v: &[f64]) -> Result<Vec<f64>> {
        op.check_len(v.len())?;
        Ok(self.circulant_product(op.first_column(), op.first_row(), v))
    }

    /// Entrywise `ln(exp(log_op) exp(log_v))`.
    ///
    /// The matrix is shifted by one global maximum over its first row and
    /// column, the vector by its own maximum, the product runs in linear
    /// space, and both maxima are added back. Outputs that are zero or
    /// negative after the inverse FFT (roundoff around true zeros) become
    /// `-inf`.
    pub fn log_matvec(&mut self, log_op: &ToeplitzOperator, log_v: &[f64]) -> Result<Vec<f64>> {
        log_op.check_len(log_v.len())?;
        let rows = log_op.rows();
        let max_op = log_op
            .first_column()
            .iter()
            .chain(log_op.first_row())
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let max_v = log_v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max_op == f64::NEG_INFINITY || max_v == f64::NEG_INFINITY {
            return Ok(vec![f64::NEG_INFINITY; rows]);
        }
        let col: Vec<f64> = log_op.first_column().iter().map(|&x| (x - max_op).exp()).collect();
        let row: Vec<f64> = log_op.first_row().iter().map(|&x| (x - max_op).exp()).collect();
        let v: Vec<f64> = log_v.iter().map(|&x| (x - max_v).exp()).collect();
        let product = self.circulant_product(&col, &row, &v);
        let shift = max_op + max_v;
        Ok(product
            .into_iter()
            .map(|y| if y > 0.0 { y.ln() + shift } else { f64::NEG_INFINITY })
            .collect())
    }

    fn circulant_product(&mut self, col: &[f64], row: &[f64], v: &[f64]) -> Vec<f64> {
        let (r, c) = (col.len(), row.len());
        let len = (r + c - 1).next_power_of_two();
        let (fwd, inv) = self.plans(len);

        let mut kernel = vec![Complex64::new(0.0, 0.0); len];
        for (slot, &x) in kernel.iter_mut().zip(col) {
            slot.re = x;
        }
        for (d, &x) in row.iter().enumerate().skip(1) {
            kernel[len - d].re = x;
        }
        let mut signal = vec![Complex64::new(0.0, 0.0); len];
        for (slot, &x) in signal.iter_mut().zip(v) {
            slot.re = x;
        }

        fwd.process(&mut kernel);
        fwd.process(&mut signal);
        for (s, k) in signal.iter_mut().zip(&kernel) {
            *s *= *k;
        }
        inv.process(&mut signal);

        let norm = 1.0 / len as f64;
        signal[..r].iter().map(|z| z.re * norm).collect()
    }
}

/// `T v` via a one-off [`ToeplitzMultiplier`].
pub fn toeplitz_matvec(op: &ToeplitzOperator, v: &[f64]) -> Result<Vec<f64>> {
    ToeplitzMultiplier::new().matvec(op, v)
}

/// Log-space `T v` via a one-off [`ToeplitzMultiplier`].
pub fn log_toeplitz_matvec(log_op: &ToeplitzOperator, log_v: &[f64]) -> Result<Vec<f64>> {
    ToeplitzMultiplier::new().log_matvec(log_op, log_v)
}
