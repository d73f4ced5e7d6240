//! Barry–Hartigan product partition model for changes in the mean.
//!
//! A partition `rho` with `b` blocks has prior weight
//! `∫_0^p0 p^(b-1) (1-p)^(n-b) dp`. Writing `w = sigma^2 / (sigma0^2 + sigma^2)`
//! with `w ~ U(0, w0)`, the data enter through the within- and between-block
//! sums of squares `W` and `B`:
//!
//! ```text
//! f(X | rho) ∝ ∫_0^w0 w^((b-1)/2) / (W + B w)^((n-1)/2) dw
//! ```
//!
//! Each sweep resamples the boundary indicators `U_i` (a change between
//! positions `i` and `i + 1`) one at a time from their conditional odds.
//! Given `rho` and `w`, a block's level has posterior mean
//! `(1 - w) * block mean + w * grand mean`, averaged over `w | rho, X`.

use serde::{Deserialize, Serialize};

use super::special::{ln_inc_beta, log_add};
use crate::error::{invalid, Result};
use crate::ingest::AnnualSeries;
use crate::sim::rng::rng_stream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcpConfig {
    /// Total sweeps, burn-in included.
    pub iterations: usize,
    pub burnin: usize,
    pub p0: f64,
    pub w0: f64,
    pub seed: u64,
}

impl Default for BcpConfig {
    fn default() -> Self {
        BcpConfig {
            iterations: 550,
            burnin: 50,
            p0: 0.2,
            w0: 0.2,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcpResult {
    pub posterior_mean: Vec<f64>,
    /// `change_prob[t]`: posterior probability that a new block starts at
    /// `t + 1`. The final entry is always 0.
    pub change_prob: Vec<f64>,
    pub iterations: usize,
    pub burnin: usize,
    pub p0: f64,
    pub w0: f64,
}

pub fn barry_hartigan(s: &AnnualSeries, cfg: &BcpConfig) -> Result<BcpResult> {
    barry_hartigan_values(s.complete()?, cfg)
}

/// `ln ∫_0^w0 w^(m/2) (W + B w)^(-c) dw` with `c = (n-1)/2`, indexed by the
/// doubled exponent `m`.
pub(crate) struct WIntegral {
    c: f64,
    w0: f64,
    ln_w0: f64,
    /// `ln B(m/2 + 1, c - m/2 - 1)` where both arguments are positive.
    ln_beta: Vec<f64>,
}

impl WIntegral {
    pub(crate) fn new(n: usize, w0: f64) -> Self {
        let c = (n as f64 - 1.0) / 2.0;
        let ln_beta = (0..=2 * n + 4)
            .map(|m| {
                let a = m as f64 / 2.0 + 1.0;
                let b = c - a;
                if b > 0.0 {
                    statrs::function::beta::ln_beta(a, b)
                } else {
                    f64::NAN
                }
            })
            .collect();
        WIntegral {
            c,
            w0,
            ln_w0: w0.ln(),
            ln_beta,
        }
    }

    pub(crate) fn ln(&self, m: usize, within: f64, between: f64) -> f64 {
        let alpha = m as f64 / 2.0;
        let c = self.c;
        if between <= 1e-14 * within {
            // Integrand is w^alpha W^-c.
            return -c * within.ln() + (alpha + 1.0) * self.ln_w0 - (alpha + 1.0).ln();
        }
        let bb = c - alpha - 1.0;
        if bb > 0.0 {
            let u0 = between * self.w0 / (within + between * self.w0);
            let lb = self.ln_beta[m];
            let lower = if u0 < (alpha + 2.0) / (alpha + bb + 3.0) {
                ln_inc_beta(alpha + 1.0, bb, u0)
            } else {
                // Upper tail through the complement, reusing the cached B(a, b).
                let upper = ln_inc_beta(bb, alpha + 1.0, 1.0 - u0);
                lb + (-(upper - lb).exp()).ln_1p()
            };
            (alpha + 1.0 - c) * within.ln() - (alpha + 1.0) * between.ln() + lower
        } else {
            self.quadrature(alpha, within, between)
        }
    }

    /// Composite Simpson on `[0, w0]` for the few partitions with nearly as
    /// many blocks as observations, where the beta form has no positive
    /// second parameter. The integrand is smooth there because `alpha >= 0`.
    fn quadrature(&self, alpha: f64, within: f64, between: f64) -> f64 {
        const N: usize = 512;
        let h = self.w0 / N as f64;
        let mut acc = f64::NEG_INFINITY;
        for i in 1..=N {
            let w = i as f64 * h;
            let wt: f64 = if i == N {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let f = alpha * w.ln() - self.c * (within + between * w).ln();
            acc = log_add(acc, wt.ln() + f);
        }
        // the i = 0 node contributes only when alpha = 0
        if alpha == 0.0 {
            acc = log_add(acc, -self.c * within.ln());
        }
        acc + (h / 3.0).ln()
    }
}

/// `ln ∫_0^p0 p^(b-1) (1-p)^(n-b) dp` for `b = 0..=n` (entry 0 unused).
pub(crate) fn ln_partition_prior(n: usize, p0: f64) -> Vec<f64> {
    (0..=n)
        .map(|b| {
            if b == 0 {
                f64::NAN
            } else {
                ln_inc_beta(b as f64, (n - b) as f64 + 1.0, p0)
            }
        })
        .collect()
}

pub fn barry_hartigan_values(y: &[f64], cfg: &BcpConfig) -> Result<BcpResult> {
    let n = y.len();
    if n < 4 {
        return invalid(format!("need at least 4 observations, got {n}"));
    }
    if !(cfg.p0 > 0.0 && cfg.p0 <= 1.0) || !(cfg.w0 > 0.0 && cfg.w0 <= 1.0) {
        return invalid("p0 and w0 must lie in (0, 1]");
    }
    if cfg.burnin >= cfg.iterations {
        return invalid("burnin must be smaller than the total number of sweeps");
    }
    let mut result = BcpResult {
        posterior_mean: y.to_vec(),
        change_prob: vec![0.0; n],
        iterations: cfg.iterations,
        burnin: cfg.burnin,
        p0: cfg.p0,
        w0: cfg.w0,
    };
    if crate::stats::is_constant(y) {
        return Ok(result);
    }

    let grand = crate::stats::mean(y);
    let mut s = vec![0.0; n + 1];
    let mut tss = 0.0;
    for (i, v) in y.iter().enumerate() {
        let c = v - grand;
        s[i + 1] = s[i] + c;
        tss += c * c;
    }
    let w_floor = 1e-12 * tss;
    let seg_sq = |a: usize, b: usize| {
        let d = s[b] - s[a];
        d * d / (b - a) as f64
    };
    let lnp = ln_partition_prior(n, cfg.p0);
    let wint = WIntegral::new(n, cfg.w0);
    let mut rng = rng_stream(cfg.seed, 0);

    let mut u = vec![false; n - 1];
    let mut blocks = 1usize;
    let mut end = vec![n; n];
    let mut change = vec![0u32; n];
    let mut level = vec![0.0; n];

    for sweep in 0..cfg.iterations {
        // end[k]: exclusive end of the block holding k, from the indicators
        // at the start of the sweep. Only indices right of the current
        // position are read, and those are not yet updated.
        end[n - 1] = n;
        for k in (0..n - 1).rev() {
            end[k] = if u[k] { k + 1 } else { end[k + 1] };
        }
        let mut bsum = 0.0;
        {
            let mut a = 0;
            while a < n {
                let b = end[a];
                bsum += seg_sq(a, b);
                a = b;
            }
        }
        let mut start = 0usize;
        for i in 0..n - 1 {
            let r = end[i + 1];
            let left = seg_sq(start, i + 1);
            let right = seg_sq(i + 1, r);
            let joint = seg_sq(start, r);
            let rest = bsum - if u[i] { left + right } else { joint };
            let b0 = blocks - u[i] as usize;
            let between0 = (rest + joint).max(0.0);
            let between1 = (rest + left + right).max(0.0);
            let within0 = (tss - between0).max(w_floor);
            let within1 = (tss - between1).max(w_floor);
            let log_odds = lnp[b0 + 1] - lnp[b0] + wint.ln(b0, within1, between1)
                - wint.ln(b0 - 1, within0, between0);
            let prob = 1.0 / (1.0 + (-log_odds).exp());
            let take = rng.uniform() < prob;
            u[i] = take;
            blocks = b0 + take as usize;
            bsum = rest + if take { left + right } else { joint };
            if take {
                start = i + 1;
            }
        }

        if sweep >= cfg.burnin {
            let mut bsum = 0.0;
            let mut bounds = Vec::with_capacity(blocks + 1);
            bounds.push(0);
            for (k, &on) in u.iter().enumerate() {
                if on {
                    change[k] += 1;
                    bounds.push(k + 1);
                }
            }
            bounds.push(n);
            for w in bounds.windows(2) {
                bsum += seg_sq(w[0], w[1]);
            }
            let within = (tss - bsum).max(w_floor);
            let m = blocks - 1;
            let shrink = (wint.ln(m + 2, within, bsum) - wint.ln(m, within, bsum)).exp();
            for w in bounds.windows(2) {
                let mean = (s[w[1]] - s[w[0]]) / (w[1] - w[0]) as f64;
                let v = (1.0 - shrink) * mean;
                for l in &mut level[w[0]..w[1]] {
                    *l += v;
                }
            }
        }
    }

    let kept = (cfg.iterations - cfg.burnin) as f64;
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    for t in 0..n {
        // Clamp only guards against last-bit rounding; the estimate is a
        // convex combination of segment means.
        result.posterior_mean[t] = (grand + level[t] / kept).clamp(lo, hi);
        result.change_prob[t] = change[t] as f64 / kept;
    }
    Ok(result)
}
