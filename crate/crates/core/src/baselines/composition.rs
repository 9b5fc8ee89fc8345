//! Nonadaptive composition of exponential mechanisms, and the per-call
//! budget search built on it.

use crate::numerics::log_sum_exp;

/// Target `delta` for the approximate-DP baselines.
pub const DEFAULT_DELTA: f64 = 1e-6;

/// Granularity of the per-call budget search.
pub const EPSILON_STEP: f64 = 0.01;

/// `delta` such that `m` nonadaptive `eps`-DP exponential mechanisms are
/// `(eps_g, delta)`-DP:
///
/// ```text
/// t_l   = clip((eps_g + (l + 1) eps) / (m + 1), 0, eps)
/// p_l   = (e^{-t_l} - e^{-eps}) / (1 - e^{-eps})
/// delta = max_{0<=l<=m} sum_{i=0..=m} C(m,i) p_l^{m-i} (1-p_l)^i max(e^{m t_l - i eps} - e^{eps_g}, 0)
/// ```
///
/// Every term is assembled in log space. The result is capped at 1.
pub fn ddr_delta(eps: f64, m: usize, eps_g: f64) -> f64 {
    assert!(eps > 0.0 && eps_g > 0.0 && m >= 1, "ddr_delta needs eps, eps_g > 0 and m >= 1");
    let mf = m as f64;
    let ln_denominator = (-(-eps).exp_m1()).ln();
    let ln_choose: Vec<f64> = {
        let ln_fact: Vec<f64> = (0..=m)
            .scan(0.0, |acc, k| {
                if k > 0 {
                    *acc += (k as f64).ln();
                }
                Some(*acc)
            })
            .collect();
        (0..=m).map(|i| ln_fact[m] - ln_fact[i] - ln_fact[m - i]).collect()
    };

    let mut worst: f64 = 0.0;
    let mut terms = Vec::with_capacity(m + 1);
    for l in 0..=m {
        let t = ((eps_g + (l as f64 + 1.0) * eps) / (mf + 1.0)).clamp(0.0, eps);
        // ln p and ln(1 - p) without cancellation
        let ln_p = -t + (-(t - eps).exp_m1()).ln() - ln_denominator;
        let ln_q = (-(-t).exp_m1()).ln() - ln_denominator;
        terms.clear();
        for i in 0..=m {
            let exponent = mf * t - i as f64 * eps;
            if exponent <= eps_g {
                continue;
            }
            let stay = m - i;
            let mut ln_term = ln_choose[i] + exponent + (-(eps_g - exponent).exp_m1()).ln();
            if stay > 0 {
                ln_term += stay as f64 * ln_p;
            }
            if i > 0 {
                ln_term += i as f64 * ln_q;
            }
            terms.push(ln_term);
        }
        worst = worst.max(log_sum_exp(&terms).exp());
    }
    worst.min(1.0)
}

/// Largest multiple of [`EPSILON_STEP`] in `(0, eps_g]` whose
/// [`ddr_delta`] is at most `delta_cap`, floored at basic composition's
/// `eps_g / m`.
pub fn solve_per_call_epsilon(m: usize, eps_g: f64, delta_cap: f64) -> f64 {
    assert!(m >= 1 && eps_g > 0.0);
    let basic = eps_g / m as f64;
    let top = (eps_g / EPSILON_STEP + 1e-9).floor() as u64;
    for k in (1..=top).rev() {
        let eps = k as f64 / (1.0 / EPSILON_STEP);
        if eps < basic {
            break;
        }
        if ddr_delta(eps, m, eps_g) <= delta_cap {
            return eps.max(basic);
        }
    }
    basic
}
