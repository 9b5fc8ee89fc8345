//! Numerically stable primitives used by the mechanisms.

mod logspace;
mod racing;
mod toeplitz;

pub use logspace::{ln_factorial, log_add_exp, log_sum_exp};
pub use racing::racing_sample;
pub use toeplitz::{log_toeplitz_matvec, toeplitz_matvec, ToeplitzMultiplier, ToeplitzOperator};
