//! Heteroskedasticity-robust portmanteau test with automatic lag choice.
//!
//! Each lag-`j` correlation is the autocovariance divided by the square
//! root of the lag-`j` autocovariance of squared deviations, then inflated
//! by the small-sample factor `(T + 2) / (T - j)`. The lag `p~` maximises
//! `Q_p - pi(p, T)`, where the penalty is BIC-like (`p log T`) when every
//! correlation is small (`sqrt(T) max|rho| <= sqrt(q log T)`) and AIC-like
//! (`2p`) otherwise.

use serde::{Deserialize, Serialize};

use super::{check_input, DependenceReport, TestKind};
use crate::error::{Error, Result};
use crate::ingest::AnnualSeries;
use crate::stats;

/// Penalty switching constant.
pub const SWITCH_Q: f64 = 2.4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortmanteauDetail {
    /// Squared robust correlations, index `j - 1` for lag `j`.
    pub rho2: Vec<f64>,
    pub chosen_lag: usize,
    pub statistic: f64,
    pub p_value: f64,
    pub bic_penalty: bool,
}

pub fn el_portmanteau(s: &AnnualSeries, max_lag_bound: Option<usize>) -> Result<DependenceReport> {
    let y = check_input(s)?;
    let d = el_portmanteau_values(y, max_lag_bound)?;
    let mut r = DependenceReport::new(TestKind::Q, d.statistic, d.p_value, s);
    r.chosen_lag = Some(d.chosen_lag);
    r.dof = Some(1.0);
    Ok(r)
}

pub fn el_portmanteau_values(y: &[f64], max_lag_bound: Option<usize>) -> Result<PortmanteauDetail> {
    let n = y.len();
    let bound = max_lag_bound
        .unwrap_or_else(|| (n as f64).sqrt().floor() as usize)
        .clamp(1, n - 1);
    let nf = n as f64;
    let mean = stats::mean(y);
    let e: Vec<f64> = y.iter().map(|v| v - mean).collect();

    let mut rho2 = Vec::with_capacity(bound);
    for j in 1..=bound {
        let (mut gamma, mut tau) = (0.0, 0.0);
        for t in j..n {
            let p = e[t] * e[t - j];
            gamma += p;
            tau += p * p;
        }
        let m = (n - j) as f64;
        gamma /= m;
        tau /= m;
        if tau <= 0.0 {
            return Err(Error::ZeroVariance);
        }
        rho2.push(gamma * gamma / tau * (nf + 2.0) / m);
    }

    let max_abs = rho2.iter().fold(0.0f64, |a, r| a.max(r.sqrt()));
    let bic_penalty = nf.sqrt() * max_abs <= (SWITCH_Q * nf.ln()).sqrt();
    let per_lag = if bic_penalty { nf.ln() } else { 2.0 };

    let mut chosen_lag = 1;
    let mut best = f64::NEG_INFINITY;
    let mut cum = 0.0;
    for (i, r) in rho2.iter().enumerate() {
        cum += nf * r;
        let p = i + 1;
        let crit = cum - per_lag * p as f64;
        if crit > best {
            best = crit;
            chosen_lag = p;
        }
    }
    let statistic = nf * rho2[..chosen_lag].iter().sum::<f64>();
    Ok(PortmanteauDetail {
        rho2,
        chosen_lag,
        statistic,
        p_value: stats::chi2_sf(statistic, 1.0),
        bic_penalty,
    })
}
