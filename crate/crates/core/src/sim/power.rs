use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::rng_stream;
use crate::bayes::{barry_hartigan_values, BcpConfig};
use crate::changepoint::{bai_perron_values, cbs_values, BaiPerronConfig, CbsConfig};
use crate::dependence::{run_test, DependenceConfig, TestKind};
use crate::error::{invalid, Error, Result};
use crate::ingest::{AnnualSeries, Season};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Detector {
    #[serde(rename = "BP")]
    Bp,
    #[serde(rename = "CBS")]
    Cbs,
    #[serde(rename = "BCP")]
    Bcp,
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Detector::Bp => "BP",
            Detector::Cbs => "CBS",
            Detector::Bcp => "BCP",
        })
    }
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "BP" => Ok(Detector::Bp),
            "CBS" | "VO" => Ok(Detector::Cbs),
            "BCP" | "BH" => Ok(Detector::Bcp),
            other => invalid(format!("unknown detector {other:?}")),
        }
    }
}

/// What counts as a detection in one replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DetectionRule {
    /// The detector reports at least one break anywhere.
    AnyBreak,
    /// Posterior change probability reaches `threshold` within `window`
    /// positions of a true break. With no true break, anywhere counts.
    PosteriorNear { threshold: f64, window: usize },
}

impl DetectionRule {
    pub fn default_for(detector: Detector) -> Self {
        match detector {
            Detector::Bcp => DetectionRule::PosteriorNear {
                threshold: 0.15,
                window: 10,
            },
            _ => DetectionRule::AnyBreak,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerScenario {
    pub name: String,
    pub n: usize,
    /// `(length, mean shift in noise standard deviations)`.
    pub segments: Vec<(usize, f64)>,
    pub detector: Detector,
    pub replicates: usize,
    pub seed: u64,
    pub detection_rule: DetectionRule,
    pub bai_perron: BaiPerronConfig,
    pub cbs: CbsConfig,
    pub bcp: BcpConfig,
}

impl PowerScenario {
    pub fn new(
        segments: Vec<(usize, f64)>,
        detector: Detector,
        replicates: usize,
        seed: u64,
    ) -> Self {
        PowerScenario {
            name: String::new(),
            n: segments.iter().map(|s| s.0).sum(),
            segments,
            detector,
            replicates,
            seed,
            detection_rule: DetectionRule::default_for(detector),
            bai_perron: BaiPerronConfig::default(),
            cbs: CbsConfig::default(),
            bcp: BcpConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() || self.segments.iter().any(|s| s.0 == 0) {
            return invalid("segments must be non-empty with positive lengths");
        }
        let total: usize = self.segments.iter().map(|s| s.0).sum();
        if total != self.n {
            return invalid(format!(
                "segment lengths sum to {total}, expected n = {}",
                self.n
            ));
        }
        if self.replicates == 0 {
            return invalid("replicates must be at least 1");
        }
        if self.segments.iter().any(|s| !s.1.is_finite()) {
            return invalid("segment shifts must be finite");
        }
        Ok(())
    }

    /// Last index of every segment but the final one where the mean moves.
    pub fn true_breaks(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut end = 0;
        for w in self.segments.windows(2) {
            end += w[0].0;
            if w[0].1 != w[1].1 {
                out.push(end - 1);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerResult {
    pub label: String,
    pub scenario: Option<PowerScenario>,
    pub replicates: usize,
    pub detections: usize,
    pub detection_rate: f64,
    pub mc_stderr: f64,
}

impl PowerResult {
    fn from_counts(
        label: String,
        scenario: Option<PowerScenario>,
        detections: usize,
        replicates: usize,
    ) -> Self {
        let r = detections as f64 / replicates as f64;
        PowerResult {
            label,
            scenario,
            replicates,
            detections,
            detection_rate: r,
            mc_stderr: (r * (1.0 - r) / replicates as f64).sqrt(),
        }
    }
}

/// The published designs: a null of length 300, two half-sigma steps and a
/// raised middle segment (50 of 150, 33 of 100) at three heights, each for
/// BP and CBS, plus the half-sigma midpoint steps scored for BCP.
pub fn published_scenarios(replicates: usize, seed: u64) -> Vec<PowerScenario> {
    let mut designs: Vec<(String, Vec<(usize, f64)>)> = vec![
        ("null 300".into(), vec![(300, 0.0)]),
        ("150+150 shift 0.5".into(), vec![(150, 0.0), (150, 0.5)]),
        ("100+100 shift 0.5".into(), vec![(100, 0.0), (100, 0.5)]),
    ];
    for h in [1.0, 0.75, 0.5] {
        designs.push((
            format!("middle 50 of 150 shift {h}"),
            vec![(50, 0.0), (50, h), (50, 0.0)],
        ));
    }
    for h in [1.0, 0.75, 0.5] {
        designs.push((
            format!("middle 33 of 100 shift {h}"),
            vec![(33, 0.0), (33, h), (34, 0.0)],
        ));
    }
    let mut out = Vec::new();
    for (name, segs) in designs {
        for det in [Detector::Bp, Detector::Cbs] {
            let mut sc = PowerScenario::new(segs.clone(), det, replicates, seed);
            sc.name = format!("{name} {det}");
            out.push(sc);
        }
    }
    for n in [200usize, 300] {
        let mut sc = PowerScenario::new(
            vec![(n / 2, 0.0), (n / 2, 0.5)],
            Detector::Bcp,
            replicates,
            seed,
        );
        sc.name = format!("{}+{} shift 0.5 BCP", n / 2, n / 2);
        out.push(sc);
    }
    out
}

/// Data for replicate `rep`: unit-variance Gaussian noise around the
/// segment means. Also returns a seed for the detector's own randomness.
pub fn simulate(sc: &PowerScenario, rep: u64) -> (Vec<f64>, u64) {
    let mut rng = rng_stream(sc.seed, rep);
    let mut y = Vec::with_capacity(sc.n);
    for &(len, shift) in &sc.segments {
        for _ in 0..len {
            y.push(shift + rng.normal());
        }
    }
    let detector_seed = rng.next_u64();
    (y, detector_seed)
}

fn detects(sc: &PowerScenario, y: &[f64], seed: u64) -> Result<bool> {
    match sc.detector {
        Detector::Bp => Ok(bai_perron_values(y, &sc.bai_perron)?.chosen_k > 0),
        Detector::Cbs => {
            let cfg = CbsConfig { seed, ..sc.cbs };
            Ok(!cbs_values(y, &cfg)?.indices.is_empty())
        }
        Detector::Bcp => {
            let cfg = BcpConfig { seed, ..sc.bcp };
            let prob = barry_hartigan_values(y, &cfg)?.change_prob;
            let (threshold, window) = match sc.detection_rule {
                DetectionRule::PosteriorNear { threshold, window } => (threshold, window),
                DetectionRule::AnyBreak => (0.5, y.len()),
            };
            let breaks = sc.true_breaks();
            if breaks.is_empty() {
                return Ok(prob.iter().any(|&p| p >= threshold));
            }
            Ok(breaks.iter().any(|&b| {
                let lo = b.saturating_sub(window);
                let hi = (b + window).min(y.len() - 1);
                prob[lo..=hi].iter().any(|&p| p >= threshold)
            }))
        }
    }
}

/// Detection rate over `sc.replicates` seeded replicates. Replicates run in
/// parallel; each one depends only on `(seed, replicate index)`.
pub fn run_power(sc: &PowerScenario) -> Result<PowerResult> {
    sc.validate()?;
    let hits = (0..sc.replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let (y, seed) = simulate(sc, rep);
            detects(sc, &y, seed)
        })
        .collect::<Result<Vec<bool>>>()?;
    let count = hits.iter().filter(|&&h| h).count();
    let label = if sc.name.is_empty() {
        format!("{} n={}", sc.detector, sc.n)
    } else {
        sc.name.clone()
    };
    Ok(PowerResult::from_counts(
        label,
        Some(sc.clone()),
        count,
        sc.replicates,
    ))
}

/// Rejection frequency (`p < level`) of a dependence test on iid N(0, 1)
/// series of length `n`.
pub fn run_size(
    test: TestKind,
    n: usize,
    replicates: usize,
    level: f64,
    seed: u64,
    cfg: &DependenceConfig,
) -> Result<PowerResult> {
    run_rejections(test, n, replicates, level, seed, cfg, |_, rng| rng.normal())
}

/// Same as [`run_size`] for data from an arbitrary generator `step(prev, rng)`.
pub(crate) fn run_rejections(
    test: TestKind,
    n: usize,
    replicates: usize,
    level: f64,
    seed: u64,
    cfg: &DependenceConfig,
    step: impl Fn(f64, &mut super::rng::RngStream) -> f64 + Sync,
) -> Result<PowerResult> {
    if n < crate::dependence::MIN_LENGTH {
        return invalid(format!(
            "n must be at least {}",
            crate::dependence::MIN_LENGTH
        ));
    }
    if replicates == 0 {
        return invalid("replicates must be at least 1");
    }
    let hits = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = rng_stream(seed, rep);
            let mut prev = 0.0;
            let values: Vec<f64> = (0..n)
                .map(|_| {
                    prev = step(prev, &mut rng);
                    prev
                })
                .collect();
            let s = AnnualSeries::new("sim", Season::Raw, 1, values);
            let cfg = DependenceConfig {
                seed: rng.next_u64(),
                ..cfg.clone()
            };
            Ok(run_test(test, &s, &cfg)?.p_value < level)
        })
        .collect::<Result<Vec<bool>>>()?;
    let count = hits.iter().filter(|&&h| h).count();
    Ok(PowerResult::from_counts(
        format!("{test} n={n}"),
        None,
        count,
        replicates,
    ))
}

/// AR(1) rejection rate, used for power checks of the dependence tests.
pub fn run_ar1_power(
    test: TestKind,
    phi: f64,
    n: usize,
    replicates: usize,
    level: f64,
    seed: u64,
    cfg: &DependenceConfig,
) -> Result<PowerResult> {
    run_rejections(test, n, replicates, level, seed, cfg, move |prev, rng| {
        phi * prev + rng.normal()
    })
}
