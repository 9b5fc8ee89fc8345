use crate::error::{Error, Result};
use crate::numerics::racing_sample;
use crate::rng::RandomSource;

use super::table::LogAlphaTable;

/// Nondecreasing interval indices `i_1 <= ... <= i_m`, each in `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalSequence(Vec<usize>);

impl IntervalSequence {
    pub fn new(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] <= w[1]));
        Self(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

/// Sample a complete interval sequence from the table, last block first.
///
/// Each step races over the flat `(n + 1) * m` grid of `(i, k)` pairs with
/// weight `alpha(j, i, k) phi(i -> i_{j+1}, j + 1)`; pairs with `k > j`, or
/// with `i >= i_{j+1}` after the first step, carry `-inf`. The chosen `i`
/// fills positions `j-k+1..=j` and the walk continues at `j - k`.
pub fn backward_sample(table: &LogAlphaTable, rng: &mut RandomSource) -> Result<IntervalSequence> {
    let m = table.m();
    let intervals = table.intervals();
    let n = intervals - 1;
    let kernel = table.kernel();

    let mut out = vec![0usize; m];
    let mut weights = vec![f64::NEG_INFINITY; intervals * m];
    let mut j = m;
    let mut next = n;
    let mut inclusive = true;

    while j > 0 {
        let limit = if inclusive { next + 1 } else { next };
        for (i, cell) in weights.chunks_exact_mut(m).enumerate() {
            if i >= limit {
                cell.fill(f64::NEG_INFINITY);
                continue;
            }
            let link = kernel.log_phi((next - i) as i64, j + 1);
            for (slot, k) in cell.iter_mut().zip(1..) {
                *slot = if k <= j {
                    table.log_alpha(j, i, k) + link
                } else {
                    f64::NEG_INFINITY
                };
            }
        }
        let pick = racing_sample(&weights, rng).map_err(|e| match e {
            Error::NoFiniteWeight => Error::Unsatisfiable { prefix: j },
            other => other,
        })?;
        let (i, k) = (pick / m, pick % m + 1);
        out[j - k..j].fill(i);
        j -= k;
        next = i;
        inclusive = false;
    }
    Ok(IntervalSequence(out))
}
