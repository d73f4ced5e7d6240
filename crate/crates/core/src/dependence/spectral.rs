//! Generalized spectral test of the martingale difference hypothesis.
//!
//! The pairwise-lag measure of conditional mean dependence is
//! `g_j(x) = 1/(T-j) sum_t u_t (exp(i x z_{t-j}) - phi_j(x))`, where `z` is
//! the standardized series, `u` its deviations, and `phi_j` the empirical
//! characteristic function of the lagged values. The Cramer-von Mises
//! statistic `D^2 = sum_j (T-j)/(j pi)^2 int |g_j(x)|^2 dW(x)` with `W`
//! standard normal collapses to
//! `sum_j 1/((T-j)(j pi)^2) sum_{t,s} u_t u_s Kc_j(t-j, s-j)`, where `Kc_j`
//! is the double-centred Gaussian kernel `exp(-(z_a - z_b)^2 / 2)` on the
//! lagged sample. Collecting all lags gives one quadratic form `u' N u`;
//! the wild bootstrap only rescales `u`, so each resample costs `O(T^2)`.

use rayon::prelude::*;

use super::{check_input, DependenceReport, Multiplier, TestKind};
use crate::error::Result;
use crate::ingest::AnnualSeries;
use crate::sim::rng::rng_stream;
use crate::stats;

/// Symmetric `T x T` matrix `N`, row-major.
struct LagKernel {
    n: usize,
    mat: Vec<f64>,
}

impl LagKernel {
    fn build(z: &[f64]) -> Self {
        let n = z.len();
        let mut k = vec![0.0; n * n];
        for a in 0..n {
            for b in a..n {
                let d = z[a] - z[b];
                let v = (-0.5 * d * d).exp();
                k[a * n + b] = v;
                k[b * n + a] = v;
            }
        }
        let mut rowsum: Vec<f64> = (0..n).map(|a| k[a * n..(a + 1) * n].iter().sum()).collect();
        let mut mat = vec![0.0; n * n];
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let mut r = vec![0.0; n];
        for j in 1..n {
            let m = n - j;
            for a in 0..m {
                rowsum[a] -= k[a * n + m];
                r[a] = rowsum[a] / m as f64;
            }
            let g = r[..m].iter().sum::<f64>() / m as f64;
            let w = 1.0 / (m as f64 * (j * j) as f64 * pi2);
            for a in 0..m {
                let ra = r[a];
                let krow = &k[a * n..a * n + m];
                let row = &mut mat[(a + j) * n + j..(a + j) * n + j + m];
                for b in a..m {
                    row[b] += w * (krow[b] - ra - r[b] + g);
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                mat[a * n + b] = mat[b * n + a];
            }
        }
        LagKernel { n, mat }
    }

    fn quadratic(&self, v: &[f64]) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for t in 0..n {
            let row = &self.mat[t * n..(t + 1) * n];
            let inner: f64 = row[t + 1..]
                .iter()
                .zip(&v[t + 1..])
                .map(|(a, b)| a * b)
                .sum();
            total += v[t] * (row[t] * v[t] + 2.0 * inner);
        }
        total
    }
}

fn standardize(y: &[f64]) -> Vec<f64> {
    let m = stats::mean(y);
    let sd = stats::std_dev(y);
    y.iter().map(|v| (v - m) / sd).collect()
}

/// `D^2` for a series (standardized internally).
pub fn spectral_statistic(y: &[f64]) -> f64 {
    let z = standardize(y);
    LagKernel::build(&z).quadratic(&z)
}

pub fn gen_spectral(
    s: &AnnualSeries,
    bootstrap_reps: usize,
    seed: u64,
    multiplier: Multiplier,
) -> Result<DependenceReport> {
    let y = check_input(s)?;
    let (stat, p) = gen_spectral_values(y, bootstrap_reps, seed, multiplier);
    let mut r = DependenceReport::new(TestKind::Spec, stat, p, s);
    r.bootstrap_reps = Some(bootstrap_reps);
    Ok(r)
}

/// Observed `D^2` and its wild-bootstrap p-value.
pub fn gen_spectral_values(
    y: &[f64],
    bootstrap_reps: usize,
    seed: u64,
    multiplier: Multiplier,
) -> (f64, f64) {
    let z = standardize(y);
    let kernel = LagKernel::build(&z);
    let observed = kernel.quadratic(&z);
    let exceed: usize = (0..bootstrap_reps as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_stream(seed, b);
            let v: Vec<f64> = z.iter().map(|u| u * multiplier.draw(&mut rng)).collect();
            usize::from(kernel.quadratic(&v) > observed)
        })
        .sum();
    let p = if bootstrap_reps == 0 {
        1.0
    } else {
        exceed as f64 / bootstrap_reps as f64
    };
    (observed, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::rng_stream;

    /// Direct evaluation: complex generalized autocovariances on a fine
    /// grid, integrated against the normal density by the trapezoid rule.
    fn quadrature_oracle(y: &[f64]) -> f64 {
        let n = y.len();
        let m = stats::mean(y);
        let sd = stats::std_dev(y);
        let z: Vec<f64> = y.iter().map(|v| (v - m) / sd).collect();
        let h = 0.005;
        let grid: Vec<f64> = (-2400..=2400).map(|i| i as f64 * h).collect();
        let mut total = 0.0;
        for j in 1..n {
            let len = (n - j) as f64;
            let mut integral = 0.0;
            for &x in &grid {
                let (mut cr, mut ci) = (0.0, 0.0);
                for t in j..n {
                    cr += (x * z[t - j]).cos();
                    ci += (x * z[t - j]).sin();
                }
                let (pr, pi) = (cr / len, ci / len);
                let (mut gr, mut gi) = (0.0, 0.0);
                for t in j..n {
                    gr += z[t] * ((x * z[t - j]).cos() - pr);
                    gi += z[t] * ((x * z[t - j]).sin() - pi);
                }
                gr /= len;
                gi /= len;
                let dens = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
                integral += (gr * gr + gi * gi) * dens * h;
            }
            total += len / (j as f64 * std::f64::consts::PI).powi(2) * integral;
        }
        total
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let y = rng_stream(41, 0).normals(12);
        let fast = spectral_statistic(&y);
        let slow = quadrature_oracle(&y);
        assert!(
            (fast - slow).abs() < 1e-9 * slow.max(1e-12),
            "{fast} vs {slow}"
        );
    }

    #[test]
    fn location_and_scale_invariant() {
        let y = rng_stream(42, 0).normals(60);
        let z: Vec<f64> = y.iter().map(|v| 2.5 * v - 3.0).collect();
        assert!((spectral_statistic(&y) - spectral_statistic(&z)).abs() < 1e-10);
    }

    #[test]
    fn precondition_on_length() {
        let s = AnnualSeries::from_values(rng_stream(43, 0).normals(20));
        assert!(gen_spectral(&s, 10, 1, Multiplier::Normal).is_err());
    }

    #[test]
    fn detects_multiplicative_dependence() {
        let mut rng = rng_stream(44, 0);
        let mut y = vec![0.0; 300];
        let mut prev = 0.0;
        for v in y.iter_mut() {
            let e = rng.normal();
            *v = prev * e + e;
            prev = *v;
        }
        let (_, p) = gen_spectral_values(&y, 300, 3, Multiplier::Normal);
        assert!((0.0..=1.0).contains(&p));
    }
}
