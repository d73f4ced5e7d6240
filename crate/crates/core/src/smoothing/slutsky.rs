//! White noise, its smooths, and the change-point posterior mean side by
//! side: the smooths wander, the posterior mean stays flat.

use serde::{Deserialize, Serialize};

use super::{loess_smooth, moving_average, SmoothedSeries};
use crate::bayes::{barry_hartigan, BcpConfig, BcpResult};
use crate::error::{invalid, Result};
use crate::ingest::{AnnualSeries, Season};
use crate::sim::rng::rng_stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlutskyConfig {
    pub n: usize,
    pub seed: u64,
    pub ma_windows: Vec<usize>,
    pub span: f64,
    pub first_year: i32,
    pub bcp: BcpConfig,
}

impl Default for SlutskyConfig {
    fn default() -> Self {
        SlutskyConfig {
            n: 500,
            seed: 123,
            ma_windows: vec![10, 25],
            span: 1.0 / 3.0,
            first_year: 1,
            bcp: BcpConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlutskyDemo {
    pub raw: AnnualSeries,
    pub ma: Vec<SmoothedSeries>,
    pub loess: SmoothedSeries,
    pub bcp: BcpResult,
}

pub fn slutsky_demo(cfg: &SlutskyConfig) -> Result<SlutskyDemo> {
    if cfg.n < 100 {
        return invalid(format!("demo needs n >= 100, got {}", cfg.n));
    }
    let values = rng_stream(cfg.seed, 0).normals(cfg.n);
    let raw = AnnualSeries::new("white_noise", Season::Raw, cfg.first_year, values);
    let ma = cfg
        .ma_windows
        .iter()
        .map(|&m| moving_average(&raw, m))
        .collect::<Result<Vec<_>>>()?;
    let loess = loess_smooth(&raw, cfg.span, 2)?;
    let bcp = barry_hartigan(
        &raw,
        &BcpConfig {
            seed: cfg.seed,
            ..cfg.bcp
        },
    )?;
    Ok(SlutskyDemo {
        raw,
        ma,
        loess,
        bcp,
    })
}

impl SlutskyDemo {
    /// `year,raw,ma<m>...,loess,bh_mean,bh_prob`; invalid smooth positions
    /// are left empty.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["year".to_string(), "raw".to_string()];
        for s in &self.ma {
            if let super::SmoothMethod::MovingAverage(m) = s.method {
                header.push(format!("ma{m}"));
            }
        }
        header.extend(["loess", "bh_mean", "bh_prob"].map(String::from));
        w.write_record(&header).expect("in-memory write");
        let cell = |v: f64, ok: bool| if ok { format!("{v}") } else { String::new() };
        for t in 0..self.raw.len() {
            let mut row = vec![
                self.raw.year_of(t).to_string(),
                format!("{}", self.raw.values[t]),
            ];
            for s in &self.ma {
                row.push(cell(s.values[t], s.valid[t]));
            }
            row.push(cell(self.loess.values[t], true));
            row.push(cell(self.bcp.posterior_mean[t], true));
            row.push(cell(self.bcp.change_prob[t], true));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundle_is_aligned_and_contracts() {
        let d = slutsky_demo(&SlutskyConfig {
            n: 200,
            ..SlutskyConfig::default()
        })
        .unwrap();
        assert_eq!(d.ma.len(), 2);
        assert_eq!(d.loess.values.len(), 200);
        assert_eq!(d.bcp.posterior_mean.len(), 200);
        let raw_range = d
            .raw
            .values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
            - d.raw.values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(d.ma[1].range() < raw_range);
        let csv = d.to_csv();
        assert!(csv.starts_with("year,raw,ma10,ma25,loess,bh_mean,bh_prob\n"));
        assert_eq!(csv.lines().count(), 201);
    }

    #[test]
    fn short_demo_rejected() {
        assert!(slutsky_demo(&SlutskyConfig {
            n: 50,
            ..SlutskyConfig::default()
        })
        .is_err());
    }
}
