use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Draw an index with probability proportional to `exp(log_weights[k])`.
///
/// Each entry races with key `ln(ln(1/U_k)) - log_weights[k]` and the smallest
/// key wins; no weight is ever exponentiated. Exactly one uniform is consumed
/// per entry, `-inf` entries included, so stream usage depends only on the
/// length of the input.
pub fn racing_sample(log_weights: &[f64], rng: &mut RandomSource) -> Result<usize> {
    let mut best = None;
    let mut best_key = f64::INFINITY;
    for (k, &w) in log_weights.iter().enumerate() {
        let u = rng.open_uniform();
        if w == f64::NEG_INFINITY {
            continue;
        }
        let key = (-u.ln()).ln() - w;
        if key < best_key || best.is_none() {
            best_key = key;
            best = Some(k);
        }
    }
    best.ok_or(Error::NoFiniteWeight)
}
