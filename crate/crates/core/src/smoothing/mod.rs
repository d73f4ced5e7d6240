//! Smoothing filters and the white-noise smoothing demonstration.

mod loess;
mod slutsky;
mod transfer;

use serde::{Deserialize, Serialize};

pub use loess::{loess_smooth, loess_values};
pub use slutsky::{slutsky_demo, SlutskyConfig, SlutskyDemo};
pub use transfer::{ma_transfer, ma_transfer_peak, TransferPeak};

use crate::error::{invalid, Result};
use crate::ingest::AnnualSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SmoothMethod {
    MovingAverage(usize),
    Loess { span: f64, degree: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothedSeries {
    pub source_name: String,
    pub method: SmoothMethod,
    pub first_year: i32,
    /// Aligned with the source years; `NaN` where `valid` is false.
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl SmoothedSeries {
    pub fn valid_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(&self.valid)
            .filter(|(_, &ok)| ok)
            .map(|(&v, _)| v)
    }

    /// Max minus min over valid positions (0 when nothing is valid).
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .valid_values()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        if hi >= lo {
            hi - lo
        } else {
            0.0
        }
    }
}

/// Centered `m`-term moving average. Position `t` is valid only when the
/// full window `t - m/2 ..= t + (m - 1 - m/2)` lies inside the series.
pub fn moving_average(s: &AnnualSeries, m: usize) -> Result<SmoothedSeries> {
    let y = s.complete()?;
    let (values, valid) = moving_average_values(y, m)?;
    Ok(SmoothedSeries {
        source_name: s.name.clone(),
        method: SmoothMethod::MovingAverage(m),
        first_year: s.first_year,
        values,
        valid,
    })
}

pub fn moving_average_values(y: &[f64], m: usize) -> Result<(Vec<f64>, Vec<bool>)> {
    let n = y.len();
    if m < 2 || m > n {
        return invalid(format!(
            "moving-average window must lie in 2..={n}, got {m}"
        ));
    }
    let left = m / 2;
    let right = m - 1 - left;
    let mut values = vec![f64::NAN; n];
    let mut valid = vec![false; n];
    for t in left..n - right {
        let sum: f64 = y[t - left..=t + right].iter().sum();
        values[t] = sum / m as f64;
        valid[t] = true;
    }
    Ok((values, valid))
}
