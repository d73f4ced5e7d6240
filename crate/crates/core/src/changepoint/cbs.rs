//! Circular binary segmentation.
//!
//! A segment of length `L` is read as a circle. For the arc `(i, j]` with
//! `k = j - i` points and centred partial sums `S`, the statistic is
//! `L (S_j - S_i)^2 / (k (L - k))`, the squared two-sample z for arc versus
//! complement up to the common variance. The maximum over arcs is compared
//! against the same maximum over random permutations of the segment.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ingest::AnnualSeries;
use crate::sim::rng::{rng_stream, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CbsConfig {
    pub alpha: f64,
    pub n_perm: usize,
    /// Smallest arc (and complement) length considered.
    pub min_width: usize,
    pub seed: u64,
    /// Stop permuting once the exceedance count already rules out
    /// `p <= alpha`. Accepted splits always see every permutation, so the
    /// segmentation and reported p-values do not change.
    pub early_stop: bool,
}

impl Default for CbsConfig {
    fn default() -> Self {
        CbsConfig {
            alpha: 0.01,
            n_perm: 1000,
            min_width: 2,
            seed: 1,
            early_stop: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CbsResult {
    /// Last index of each segment except the final one.
    pub indices: Vec<usize>,
    pub changepoints: Vec<i32>,
    pub p_values: Vec<f64>,
    pub alpha: f64,
    pub n_perm: usize,
}

/// Maximum arc statistic of `y` (already on the circle) and the arc
/// `(i, j]` attaining it, earliest arc on ties. `None` when no admissible
/// arc exists.
pub fn max_arc_statistic(y: &[f64], min_width: usize) -> Option<(f64, usize, usize)> {
    let mut sums = Vec::with_capacity(y.len() + 1);
    let mut inv = Vec::new();
    arc_scan(y, min_width, &mut sums, &mut inv, true)
}

fn arc_scan(
    y: &[f64],
    min_width: usize,
    sums: &mut Vec<f64>,
    inv: &mut Vec<f64>,
    locate: bool,
) -> Option<(f64, usize, usize)> {
    let l = y.len();
    let w = min_width.max(1);
    if l < 2 * w {
        return None;
    }
    let m = crate::stats::mean(y);
    sums.clear();
    sums.push(0.0);
    let mut acc = 0.0;
    for v in y {
        acc += v - m;
        sums.push(acc);
    }
    inv.clear();
    inv.extend((0..l).map(|k| {
        if k == 0 {
            0.0
        } else {
            1.0 / (k as f64 * (l - k) as f64)
        }
    }));
    let mut best = -1.0;
    let (mut bi, mut bj) = (0, 0);
    for i in 0..=l - w {
        let si = sums[i];
        let hi = (i + l - w).min(l);
        for j in i + w..=hi {
            let d = sums[j] - si;
            let v = d * d * inv[j - i];
            if v > best {
                best = v;
                if locate {
                    bi = i;
                    bj = j;
                }
            }
        }
    }
    Some((best * l as f64, bi, bj))
}

pub fn cbs(s: &AnnualSeries, cfg: &CbsConfig) -> Result<CbsResult> {
    let y = s.complete()?;
    let mut r = cbs_values(y, cfg)?;
    r.changepoints = r.indices.iter().map(|&i| s.year_of(i)).collect();
    Ok(r)
}

pub fn cbs_values(y: &[f64], cfg: &CbsConfig) -> Result<CbsResult> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {}", cfg.alpha));
    }
    if cfg.n_perm == 0 {
        return invalid("n_perm must be positive");
    }
    if cfg.min_width == 0 {
        return invalid("min_width must be positive");
    }
    let mut found: Vec<(usize, f64)> = Vec::new();
    let mut tests = 0u64;
    // Explicit stack in place of recursion; test order fixes the RNG streams.
    let mut stack = vec![(0usize, y.len())];
    let mut scratch = Scratch::default();
    while let Some((a, b)) = stack.pop() {
        let seg = &y[a..b];
        if seg.len() < 4.max(2 * cfg.min_width) {
            continue;
        }
        let mut rng = rng_stream(cfg.seed, tests);
        tests += 1;
        let Some((p, i, j)) = test_segment(seg, cfg, &mut rng, &mut scratch) else {
            continue;
        };
        if p > cfg.alpha {
            continue;
        }
        let mut cuts = Vec::new();
        if i > 0 {
            cuts.push(a + i);
        }
        if j < seg.len() {
            cuts.push(a + j);
        }
        let mut lo = a;
        let mut pieces = Vec::new();
        for &c in &cuts {
            found.push((c - 1, p));
            pieces.push((lo, c));
            lo = c;
        }
        pieces.push((lo, b));
        // Push in reverse so the leftmost piece is examined first.
        stack.extend(pieces.into_iter().rev());
    }
    found.sort_by_key(|f| f.0);
    Ok(CbsResult {
        indices: found.iter().map(|f| f.0).collect(),
        changepoints: found.iter().map(|f| f.0 as i32 + 1).collect(),
        p_values: found.iter().map(|f| f.1).collect(),
        alpha: cfg.alpha,
        n_perm: cfg.n_perm,
    })
}

#[derive(Default)]
struct Scratch {
    perm: Vec<f64>,
    sums: Vec<f64>,
    inv: Vec<f64>,
}

/// Permutation p-value `#{T* >= T} / n_perm` plus the maximising arc.
fn test_segment(
    seg: &[f64],
    cfg: &CbsConfig,
    rng: &mut RngStream,
    sc: &mut Scratch,
) -> Option<(f64, usize, usize)> {
    if crate::stats::is_constant(seg) {
        return None;
    }
    let (obs, i, j) = arc_scan(seg, cfg.min_width, &mut sc.sums, &mut sc.inv, true)?;
    // Relative slack so that permutations reproducing the observed arc
    // count as ties despite rounding.
    let thresh = obs * (1.0 - 1e-12);
    let give_up = (cfg.alpha * cfg.n_perm as f64).floor() as usize;
    sc.perm.clear();
    sc.perm.extend_from_slice(seg);
    let mut exceed = 0usize;
    for _ in 0..cfg.n_perm {
        rng.shuffle(&mut sc.perm);
        let (t, _, _) = arc_scan(&sc.perm, cfg.min_width, &mut sc.sums, &mut sc.inv, false)?;
        if t >= thresh {
            exceed += 1;
            if cfg.early_stop && exceed > give_up {
                return Some((1.0, i, j));
            }
        }
    }
    Some((exceed as f64 / cfg.n_perm as f64, i, j))
}
