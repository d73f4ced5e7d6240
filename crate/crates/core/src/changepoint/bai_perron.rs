//! Globally optimal mean-shift breakpoints by dynamic programming, with the
//! number of breaks chosen by BIC.
//!
//! `best[k][j]` is the smallest residual sum of squares of the first `j`
//! observations split into `k + 1` segments of length at least `h`; it
//! obeys `best[k][j] = min_i best[k-1][i] + ssr(i, j)`. The criterion for
//! `k` breaks is `T log(SSR_k / T) + (2k + 1) log T`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ingest::AnnualSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaiPerronConfig {
    /// Minimum segment length as a share of the series length.
    pub min_seg_frac: f64,
    pub k_max: usize,
}

impl Default for BaiPerronConfig {
    fn default() -> Self {
        BaiPerronConfig {
            min_seg_frac: 0.15,
            k_max: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakModel {
    pub break_indices: Vec<usize>,
    pub break_years: Vec<i32>,
    pub segment_means: Vec<f64>,
    pub ssr_by_k: Vec<f64>,
    pub bic_by_k: Vec<f64>,
    /// Optimal break indices for every feasible `k`.
    pub breaks_by_k: Vec<Vec<usize>>,
    pub chosen_k: usize,
    pub min_segment: usize,
}

/// Segment residual sums of squares in O(1) from prefix sums of the
/// (globally centred) data.
struct SegmentCost {
    s1: Vec<f64>,
    s2: Vec<f64>,
}

impl SegmentCost {
    fn new(y: &[f64]) -> Self {
        let m = crate::stats::mean(y);
        let mut s1 = vec![0.0; y.len() + 1];
        let mut s2 = vec![0.0; y.len() + 1];
        for (i, v) in y.iter().enumerate() {
            let c = v - m;
            s1[i + 1] = s1[i] + c;
            s2[i + 1] = s2[i] + c * c;
        }
        SegmentCost { s1, s2 }
    }

    /// SSR of `y[i..j]` about its own mean.
    fn ssr(&self, i: usize, j: usize) -> f64 {
        let s = self.s1[j] - self.s1[i];
        (self.s2[j] - self.s2[i] - s * s / (j - i) as f64).max(0.0)
    }
}

pub fn bai_perron(s: &AnnualSeries, cfg: &BaiPerronConfig) -> Result<BreakModel> {
    let y = s.complete()?;
    let mut model = bai_perron_values(y, cfg)?;
    model.break_years = model.break_indices.iter().map(|&i| s.year_of(i)).collect();
    Ok(model)
}

pub fn bai_perron_values(y: &[f64], cfg: &BaiPerronConfig) -> Result<BreakModel> {
    let n = y.len();
    if !(cfg.min_seg_frac > 0.0 && cfg.min_seg_frac < 1.0) {
        return invalid(format!(
            "min_seg_frac must lie in (0, 1), got {}",
            cfg.min_seg_frac
        ));
    }
    if (n as f64) * cfg.min_seg_frac < 2.0 {
        return invalid(format!(
            "series of length {n} is too short for a minimum segment share of {}",
            cfg.min_seg_frac
        ));
    }
    let h = ((cfg.min_seg_frac * n as f64) - 1e-9).ceil() as usize;
    let k_max = cfg.k_max.min(n / h - 1);
    let cost = SegmentCost::new(y);

    // best[k][j], arg[k][j]: last break (segment start) for prefix length j.
    let mut best = vec![vec![f64::INFINITY; n + 1]; k_max + 1];
    let mut arg = vec![vec![usize::MAX; n + 1]; k_max + 1];
    for j in h..=n {
        best[0][j] = cost.ssr(0, j);
    }
    for k in 1..=k_max {
        for j in (k + 1) * h..=n {
            let mut b = f64::INFINITY;
            let mut a = usize::MAX;
            for i in k * h..=j - h {
                let v = best[k - 1][i] + cost.ssr(i, j);
                if v < b {
                    b = v;
                    a = i;
                }
            }
            best[k][j] = b;
            arg[k][j] = a;
        }
    }

    let nf = n as f64;
    let mut ssr_by_k = Vec::with_capacity(k_max + 1);
    let mut bic_by_k = Vec::with_capacity(k_max + 1);
    let mut breaks_by_k = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let ssr = best[k][n];
        ssr_by_k.push(ssr);
        bic_by_k.push(nf * (ssr / nf).ln() + (2 * k + 1) as f64 * nf.ln());
        let mut starts = Vec::with_capacity(k);
        let mut j = n;
        for kk in (1..=k).rev() {
            let i = arg[kk][j];
            starts.push(i);
            j = i;
        }
        starts.reverse();
        breaks_by_k.push(starts.iter().map(|s| s - 1).collect::<Vec<_>>());
    }

    let mut chosen_k = 0;
    for k in 1..=k_max {
        if bic_by_k[k] < bic_by_k[chosen_k] {
            chosen_k = k;
        }
    }
    let break_indices = breaks_by_k[chosen_k].clone();
    let mut bounds = vec![0];
    bounds.extend(break_indices.iter().map(|b| b + 1));
    bounds.push(n);
    let segment_means = bounds
        .windows(2)
        .map(|w| crate::stats::mean(&y[w[0]..w[1]]))
        .collect();

    Ok(BreakModel {
        break_years: break_indices.iter().map(|&i| i as i32 + 1).collect(),
        break_indices,
        segment_means,
        ssr_by_k,
        bic_by_k,
        breaks_by_k,
        chosen_k,
        min_segment: h,
    })
}
