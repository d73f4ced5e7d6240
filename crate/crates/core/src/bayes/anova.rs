//! Hierarchical one-way ANOVA over consecutive blocks of years:
//! `y_ij ~ N(alpha_j, sigma_w^2)`, `alpha_j ~ N(mu, sigma_b^2)`,
//! `mu ~ N(0, 10000)`, `sigma_w, sigma_b ~ U[0, 20]`.
//!
//! `mu` and the `alpha_j` have conjugate normal updates. The two standard
//! deviations are drawn by slice sampling restricted to their prior support.
//! Stored draws are recentred: the effects sum to zero and the shift is
//! carried by the stored level `mu`. The chain itself runs on the
//! unconstrained parameters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ingest::AnnualSeries;
use crate::sim::rng::{rng_stream, RngStream};

const SIGMA_MAX: f64 = 20.0;
const MU_PRIOR_VAR: f64 = 10_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaConfig {
    pub block_len: usize,
    /// Total iterations, burn-in included.
    pub iterations: usize,
    pub burnin: usize,
    pub seed: u64,
}

impl Default for AnovaConfig {
    fn default() -> Self {
        AnovaConfig {
            block_len: 10,
            iterations: 10_000,
            burnin: 2_500,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaPosterior {
    /// One row per retained draw, one column per block.
    pub alpha_draws: Vec<Vec<f64>>,
    pub mu_draws: Vec<f64>,
    pub sigma_w_draws: Vec<f64>,
    pub sigma_b_draws: Vec<f64>,
    pub icc_draws: Vec<f64>,
    pub block_len: usize,
    /// First calendar year of each block.
    pub block_starts: Vec<i32>,
}

pub fn hierarchical_anova(s: &AnnualSeries, cfg: &AnovaConfig) -> Result<AnovaPosterior> {
    let y = s.complete()?;
    let mut post = run_chain(y, cfg, 0)?;
    post.block_starts = block_years(s, cfg.block_len);
    Ok(post)
}

pub fn hierarchical_anova_values(y: &[f64], cfg: &AnovaConfig) -> Result<AnovaPosterior> {
    run_chain(y, cfg, 0)
}

/// Independent chains on streams `0..chains` of `cfg.seed`, run in
/// parallel. Chain 0 equals [`hierarchical_anova`] with the same config.
pub fn hierarchical_anova_chains(
    s: &AnnualSeries,
    cfg: &AnovaConfig,
    chains: usize,
) -> Result<Vec<AnovaPosterior>> {
    let y = s.complete()?;
    let starts = block_years(s, cfg.block_len);
    (0..chains as u64)
        .into_par_iter()
        .map(|c| {
            let mut p = run_chain(y, cfg, c)?;
            p.block_starts = starts.clone();
            Ok(p)
        })
        .collect()
}

fn block_years(s: &AnnualSeries, block_len: usize) -> Vec<i32> {
    (0..s.len())
        .step_by(block_len.max(1))
        .map(|i| s.year_of(i))
        .collect()
}

/// Draw from the density proportional to
/// `sigma^-count * exp(-ss / (2 sigma^2))` on `(0, SIGMA_MAX]`, by slice
/// sampling with shrinkage from the whole support.
fn slice_sigma(cur: f64, count: f64, ss: f64, rng: &mut RngStream) -> f64 {
    let logf = |s: f64| -count * s.ln() - ss / (2.0 * s * s);
    let level = logf(cur) + rng.uniform().ln();
    let (mut lo, mut hi) = (0.0, SIGMA_MAX);
    for _ in 0..500 {
        let cand = lo + (hi - lo) * rng.uniform();
        if cand > 0.0 && logf(cand) > level {
            return cand;
        }
        if cand < cur {
            lo = cand;
        } else {
            hi = cand;
        }
    }
    cur
}

fn run_chain(y: &[f64], cfg: &AnovaConfig, chain: u64) -> Result<AnovaPosterior> {
    let n = y.len();
    let len = cfg.block_len;
    if len == 0 {
        return invalid("block length must be positive");
    }
    let j_count = n.div_ceil(len);
    if j_count < 2 {
        return invalid(format!("need at least 2 blocks, got {j_count}"));
    }
    if cfg.burnin >= cfg.iterations {
        return invalid("burnin must be smaller than the total number of iterations");
    }
    let blocks: Vec<&[f64]> = y.chunks(len).collect();
    let sums: Vec<f64> = blocks.iter().map(|b| b.iter().sum()).collect();
    let sizes: Vec<f64> = blocks.iter().map(|b| b.len() as f64).collect();
    let jf = j_count as f64;

    let mut rng = rng_stream(cfg.seed, chain);
    let mut alpha: Vec<f64> = sums.iter().zip(&sizes).map(|(s, k)| s / k).collect();
    let mut mu = crate::stats::mean(&alpha);
    let mut sigma_w = crate::stats::std_dev(y).clamp(1e-3, SIGMA_MAX);
    let mut sigma_b = if j_count > 1 {
        crate::stats::std_dev(&alpha).clamp(1e-3, SIGMA_MAX)
    } else {
        1.0
    };

    let kept = cfg.iterations - cfg.burnin;
    let mut post = AnovaPosterior {
        alpha_draws: Vec::with_capacity(kept),
        mu_draws: Vec::with_capacity(kept),
        sigma_w_draws: Vec::with_capacity(kept),
        sigma_b_draws: Vec::with_capacity(kept),
        icc_draws: Vec::with_capacity(kept),
        block_len: len,
        block_starts: (0..j_count).map(|j| (j * len) as i32 + 1).collect(),
    };

    for it in 0..cfg.iterations {
        let tw = 1.0 / (sigma_w * sigma_w);
        let tb = 1.0 / (sigma_b * sigma_b);
        for j in 0..j_count {
            let prec = sizes[j] * tw + tb;
            let mean = (sums[j] * tw + mu * tb) / prec;
            alpha[j] = mean + rng.normal() / prec.sqrt();
        }
        let prec = jf * tb + 1.0 / MU_PRIOR_VAR;
        let mean = alpha.iter().sum::<f64>() * tb / prec;
        mu = mean + rng.normal() / prec.sqrt();

        let ssw: f64 = blocks
            .iter()
            .zip(&alpha)
            .map(|(b, a)| b.iter().map(|v| (v - a) * (v - a)).sum::<f64>())
            .sum();
        sigma_w = slice_sigma(sigma_w, n as f64, ssw, &mut rng);
        let ssb: f64 = alpha.iter().map(|a| (a - mu) * (a - mu)).sum();
        sigma_b = slice_sigma(sigma_b, jf, ssb, &mut rng);

        if it >= cfg.burnin {
            let shift = alpha.iter().sum::<f64>() / jf;
            let mut row: Vec<f64> = alpha.iter().map(|a| a - shift).collect();
            // remove what rounding left of the sum
            let resid = row.iter().sum::<f64>() / jf;
            row.iter_mut().for_each(|a| *a -= resid);
            post.alpha_draws.push(row);
            post.mu_draws.push(shift);
            post.sigma_w_draws.push(sigma_w);
            post.sigma_b_draws.push(sigma_b);
            let vb = sigma_b * sigma_b;
            post.icc_draws.push(vb / (vb + sigma_w * sigma_w));
        }
    }
    Ok(post)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{gelman_rubin, icc_summary};

    fn synthetic(seed: u64, blocks: usize, len: usize, sw: f64, sb: f64) -> Vec<f64> {
        let mut rng = rng_stream(seed, 0);
        let mut y = Vec::new();
        for _ in 0..blocks {
            let a = sb * rng.normal();
            for _ in 0..len {
                y.push(a + sw * rng.normal());
            }
        }
        y
    }

    #[test]
    fn recovers_variance_components() {
        let y = synthetic(104, 20, 10, 1.0, 0.5);
        let cfg = AnovaConfig::default();
        let p = hierarchical_anova_values(&y, &cfg).unwrap();
        let s = icc_summary(&p).unwrap();
        assert!((0.9..=1.1).contains(&s.sigma_w.median), "{:?}", s.sigma_w);
        assert!((0.3..=0.7).contains(&s.sigma_b.median), "{:?}", s.sigma_b);
        for row in &p.alpha_draws {
            assert!(row.iter().sum::<f64>().abs() < 1e-8);
        }
        assert!(p.icc_draws.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(p
            .sigma_w_draws
            .iter()
            .chain(&p.sigma_b_draws)
            .all(|v| *v > 0.0 && *v <= SIGMA_MAX));
    }

    #[test]
    fn chains_agree() {
        let y = synthetic(102, 20, 10, 1.0, 0.5);
        let s = AnnualSeries::new("x", crate::Season::Raw, 1501, y);
        let cfg = AnovaConfig {
            iterations: 4000,
            burnin: 1000,
            ..AnovaConfig::default()
        };
        let chains = hierarchical_anova_chains(&s, &cfg, 3).unwrap();
        let sw: Vec<Vec<f64>> = chains.iter().map(|c| c.sigma_w_draws.clone()).collect();
        let sb: Vec<Vec<f64>> = chains.iter().map(|c| c.sigma_b_draws.clone()).collect();
        assert!(gelman_rubin(&sw).unwrap() < 1.1);
        assert!(gelman_rubin(&sb).unwrap() < 1.1);
        assert_eq!(chains[0], hierarchical_anova(&s, &cfg).unwrap());
        assert_eq!(chains[0].block_starts[1], 1511);
    }

    #[test]
    fn partial_trailing_block_and_minimum() {
        let y = synthetic(103, 2, 10, 1.0, 0.0);
        let cfg = AnovaConfig {
            iterations: 600,
            burnin: 100,
            ..AnovaConfig::default()
        };
        let p = hierarchical_anova_values(&y[..15], &cfg).unwrap();
        assert_eq!(p.alpha_draws[0].len(), 2);
        assert!(hierarchical_anova_values(&y[..10], &cfg).is_err());
    }

    #[test]
    fn exchangeable_blocks_cover_zero() {
        let mut rng = rng_stream(104, 0);
        let noise = rng.normals(10);
        let y: Vec<f64> = noise.iter().chain(&noise).cloned().collect();
        let cfg = AnovaConfig {
            iterations: 5000,
            burnin: 1000,
            ..AnovaConfig::default()
        };
        let p = hierarchical_anova_values(&y, &cfg).unwrap();
        let s = icc_summary(&p).unwrap();
        for a in &s.alpha {
            assert!(a.ci95_low <= 0.0 && a.ci95_high >= 0.0, "{a:?}");
        }
    }
}
