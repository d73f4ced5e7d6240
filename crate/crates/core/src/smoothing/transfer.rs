//! Power transfer function of an `m`-term moving average,
//! `f(w) = (1 - cos m w) / (m^2 (1 - cos w))`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Gain at angular frequency `omega`. Evaluated as
/// `(sin(m w / 2) / (m sin(w / 2)))^2`, which is the same ratio but stays
/// accurate near zero; `omega = 0` returns the limit 1.
pub fn ma_transfer(m: usize, omega: f64) -> f64 {
    let half = 0.5 * omega;
    let s = half.sin();
    if s.abs() < 1e-300 {
        return 1.0;
    }
    let r = (m as f64 * half).sin() / (m as f64 * s);
    r * r
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferPeak {
    pub omega: f64,
    pub gain: f64,
    /// Period in observations, `2 pi / omega`.
    pub period: f64,
}

/// Largest local maximum of the gain on `(0, pi]`, excluding the main lobe
/// at zero frequency.
pub fn ma_transfer_peak(m: usize) -> Result<TransferPeak> {
    if m < 2 {
        return invalid("moving-average window must be at least 2");
    }
    // Side lobes sit between consecutive nulls 2 pi k / m; search each one.
    let nulls: Vec<f64> = (1..)
        .map(|k| 2.0 * PI * k as f64 / m as f64)
        .take_while(|w| *w < PI)
        .collect();
    let mut best: Option<TransferPeak> = None;
    for (i, &lo) in nulls.iter().enumerate() {
        let hi = nulls.get(i + 1).copied().unwrap_or(PI);
        let omega = golden_max(|w| ma_transfer(m, w), lo, hi);
        let gain = ma_transfer(m, omega);
        let is_local = omega < PI - 1e-9 || hi < PI;
        if is_local && best.is_none_or(|b| gain > b.gain) {
            best = Some(TransferPeak {
                omega,
                gain,
                period: 2.0 * PI / omega,
            });
        }
    }
    match best {
        Some(p) => Ok(p),
        None => invalid(format!(
            "m = {m} has no side lobe below the Nyquist frequency"
        )),
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
        if (b - a).abs() < 1e-13 {
            break;
        }
    }
    0.5 * (a + b)
}
