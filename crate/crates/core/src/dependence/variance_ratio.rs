//! Automatic variance ratio test.
//!
//! The ratio is the spectral density at frequency zero relative to the
//! variance, estimated with the quadratic-spectral kernel
//! `AVR(l) = 1 + 2 sum_i k(i / l) rho_i`. The bandwidth `l` comes from the
//! AR(1) plug-in rule for that kernel, `l = 1.3221 (a T)^(1/5)` with
//! `a = 4 r^2 / (1 - r)^4`. Under the null `sqrt(T / l) (AVR - 1) / sqrt(2)`
//! is standard normal; the p-value is taken from a wild bootstrap that
//! multiplies each demeaned observation by an independent mean-zero,
//! unit-variance draw and recomputes both the bandwidth and the ratio.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_input, DependenceReport, Multiplier, TestKind};
use crate::error::Result;
use crate::ingest::AnnualSeries;
use crate::sim::rng::rng_stream;
use crate::stats;

/// Bound on the first-order coefficient fed to the bandwidth rule.
const MAX_AR_COEF: f64 = 0.97;

/// Fixed-horizon variance ratio `1 + 2 sum_{i<p} (1 - i/p) rho_i`.
/// `rho[i - 1]` is the lag-`i` autocorrelation.
pub fn variance_ratio(rho: &[f64], p: usize) -> f64 {
    let pf = p as f64;
    1.0 + 2.0
        * rho
            .iter()
            .take(p.saturating_sub(1))
            .enumerate()
            .map(|(i, r)| (1.0 - (i + 1) as f64 / pf) * r)
            .sum::<f64>()
}

/// Quadratic-spectral kernel.
pub fn qs_kernel(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        return 1.0;
    }
    let z = 6.0 * PI * x / 5.0;
    25.0 / (12.0 * PI * PI * x * x) * (z.sin() / z - z.cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvrDetail {
    pub bandwidth: f64,
    pub ratio: f64,
    /// Standardized statistic `sqrt(T / l) (AVR - 1) / sqrt(2)`.
    pub statistic: f64,
}

/// Ratio, bandwidth and standardized statistic for one series.
pub fn avr_statistic(y: &[f64]) -> AvrDetail {
    let n = y.len();
    let mean = stats::mean(y);
    let e: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let sums = stats::lagged_products(&e, n - 1);
    if sums[0] <= 0.0 {
        return AvrDetail {
            bandwidth: 0.0,
            ratio: 1.0,
            statistic: 0.0,
        };
    }
    let r1 = (sums[1] / sums[0]).clamp(-MAX_AR_COEF, MAX_AR_COEF);
    let a2 = 4.0 * r1 * r1 / (1.0 - r1).powi(4);
    let bandwidth = 1.3221 * (a2 * n as f64).powf(0.2);
    if bandwidth < 1e-6 {
        return AvrDetail {
            bandwidth,
            ratio: 1.0,
            statistic: 0.0,
        };
    }
    let ratio = 1.0
        + 2.0
            * (1..n)
                .map(|i| qs_kernel(i as f64 / bandwidth) * sums[i] / sums[0])
                .sum::<f64>();
    let statistic = (n as f64 / bandwidth).sqrt() * (ratio - 1.0) / 2f64.sqrt();
    AvrDetail {
        bandwidth,
        ratio,
        statistic,
    }
}

pub fn avr_test(
    s: &AnnualSeries,
    bootstrap_reps: usize,
    seed: u64,
    multiplier: Multiplier,
) -> Result<DependenceReport> {
    let y = check_input(s)?;
    let (detail, p) = avr_test_values(y, bootstrap_reps, seed, multiplier);
    let mut r = DependenceReport::new(TestKind::Avr, detail.statistic.abs(), p, s);
    r.chosen_lag = Some(detail.bandwidth.ceil().max(1.0) as usize);
    r.bootstrap_reps = Some(bootstrap_reps);
    Ok(r)
}

/// Observed detail and wild-bootstrap p-value (share of resamples whose
/// absolute statistic exceeds the observed one).
pub fn avr_test_values(
    y: &[f64],
    bootstrap_reps: usize,
    seed: u64,
    multiplier: Multiplier,
) -> (AvrDetail, f64) {
    let observed = avr_statistic(y);
    let mean = stats::mean(y);
    let e: Vec<f64> = y.iter().map(|v| v - mean).collect();
    let target = observed.statistic.abs();
    let exceed: usize = (0..bootstrap_reps as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_stream(seed, b);
            let star: Vec<f64> = e.iter().map(|v| v * multiplier.draw(&mut rng)).collect();
            usize::from(avr_statistic(&star).statistic.abs() > target)
        })
        .sum();
    let p = if bootstrap_reps == 0 {
        1.0
    } else {
        exceed as f64 / bootstrap_reps as f64
    };
    (observed, p)
}
