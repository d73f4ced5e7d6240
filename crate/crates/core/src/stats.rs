//! Small numeric helpers shared across modules.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sum of squared deviations from the mean.
pub fn centered_ss(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum()
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    centered_ss(x) / (x.len() as f64 - 1.0)
}

pub fn std_dev(x: &[f64]) -> f64 {
    variance(x).sqrt()
}

/// True when every value equals the first one up to relative 1e-12 of the
/// spread scale.
pub fn is_constant(x: &[f64]) -> bool {
    match x.first() {
        None => true,
        Some(&first) => {
            let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
            x.iter().all(|v| (v - first).abs() <= 1e-12 * scale)
        }
    }
}

/// Sample quantile with linear interpolation between order statistics
/// (the common "type 7" definition). `sorted` must be ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Upper-tail chi-squared probability.
pub fn chi2_sf(stat: f64, dof: f64) -> f64 {
    if !stat.is_finite() {
        return if stat > 0.0 { 0.0 } else { 1.0 };
    }
    if stat <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof).expect("positive degrees of freedom");
    dist.sf(stat).clamp(0.0, 1.0)
}

pub fn normal_inverse_cdf(u: f64) -> f64 {
    thread_local! {
        static STD: Normal = Normal::standard();
    }
    STD.with(|n| n.inverse_cdf(u))
}

/// Lagged cross-product sums `c_k = sum_{t>=k} x_t x_{t-k}` for
/// `k = 0..=max_lag`. Long inputs go through an FFT.
pub fn lagged_products(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let max_lag = max_lag.min(n.saturating_sub(1));
    if n <= 64 || max_lag <= 16 {
        return (0..=max_lag)
            .map(|k| x[k..].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
    }
    let size = (2 * n).next_power_of_two();
    let (fwd, inv) = plans(size);
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    fwd.process(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex::new(z.norm_sqr(), 0.0);
    }
    inv.process(&mut buf);
    let scale = 1.0 / size as f64;
    buf[..=max_lag].iter().map(|z| z.re * scale).collect()
}

type Plan = Arc<dyn Fft<f64>>;

fn plans(size: usize) -> (Plan, Plan) {
    thread_local! {
        static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    }
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(size), p.plan_fft_inverse(size))
    })
}
