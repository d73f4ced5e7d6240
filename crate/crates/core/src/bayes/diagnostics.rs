use serde::{Deserialize, Serialize};

use super::AnovaPosterior;
use crate::error::{invalid, Error, Result};
use crate::stats::quantile_sorted;

/// Median and equal-tailed 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub median: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

impl Interval {
    pub fn from_draws(draws: &[f64]) -> Interval {
        let mut v = draws.to_vec();
        v.sort_by(f64::total_cmp);
        Interval {
            median: quantile_sorted(&v, 0.5),
            ci95_low: quantile_sorted(&v, 0.025),
            ci95_high: quantile_sorted(&v, 0.975),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaSummary {
    pub icc: Interval,
    pub sigma_w: Interval,
    pub sigma_b: Interval,
    pub mu: Interval,
    pub alpha: Vec<Interval>,
    pub draws: usize,
}

pub fn icc_summary(a: &AnovaPosterior) -> Result<AnovaSummary> {
    let n = a.icc_draws.len();
    if n < 100 {
        return invalid(format!("need at least 100 retained draws, got {n}"));
    }
    if let Some(bad) = a.icc_draws.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Invariant(format!("ICC draw {bad} outside [0, 1]")));
    }
    let blocks = a.alpha_draws.first().map_or(0, |r| r.len());
    let alpha = (0..blocks)
        .map(|j| {
            let col: Vec<f64> = a.alpha_draws.iter().map(|r| r[j]).collect();
            Interval::from_draws(&col)
        })
        .collect();
    Ok(AnovaSummary {
        icc: Interval::from_draws(&a.icc_draws),
        sigma_w: Interval::from_draws(&a.sigma_w_draws),
        sigma_b: Interval::from_draws(&a.sigma_b_draws),
        mu: Interval::from_draws(&a.mu_draws),
        alpha,
        draws: n,
    })
}

/// Potential scale reduction factor
/// `sqrt(((n-1)/n W + B/n) / W)`, `W` the mean within-chain variance and
/// `B` equal to `n` times the variance of the chain means.
pub fn gelman_rubin(chains: &[Vec<f64>]) -> Result<f64> {
    let m = chains.len();
    if m < 2 {
        return invalid("need at least 2 chains");
    }
    let n = chains[0].len();
    if n < 10 || chains.iter().any(|c| c.len() != n) {
        return invalid("chains must share a length of at least 10");
    }
    let means: Vec<f64> = chains.iter().map(|c| crate::stats::mean(c)).collect();
    let w = chains
        .iter()
        .map(|c| crate::stats::variance(c))
        .sum::<f64>()
        / m as f64;
    if w <= 0.0 {
        return invalid("within-chain variance is zero");
    }
    let b = n as f64 * crate::stats::variance(&means);
    let nf = n as f64;
    Ok((((nf - 1.0) / nf * w + b / nf) / w).sqrt())
}
