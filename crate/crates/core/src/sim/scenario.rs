//! Scenario files: `key = value` lines, `#` comments, blank-line separated
//! blocks, one scenario per block.
//!
//! ```text
//! name = half-sigma step
//! segments = 150:0, 150:0.5
//! detector = BP, CBS
//! replicates = 1000
//! seed = 42
//! ```
//!
//! A comma-separated `detector` list expands into one scenario per
//! detector. Optional keys: `n` (checked against the segments),
//! `min_seg_frac`, `kmax`, `alpha`, `nperm`, `early_stop`, `threshold`,
//! `window`, `iterations`, `burnin`.

use super::power::{DetectionRule, Detector, PowerResult, PowerScenario};
use crate::error::{invalid, Error, Result};

fn parse_num<T: std::str::FromStr>(key: &str, v: &str, line: usize) -> Result<T> {
    v.parse().map_err(|_| Error::Parse {
        line,
        column: 1,
        msg: format!("bad value {v:?} for {key}"),
    })
}

pub fn parse_scenarios(text: &str) -> Result<Vec<PowerScenario>> {
    let mut blocks: Vec<Vec<(usize, &str, &str)>> = vec![vec![]];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if !blocks.last().unwrap().is_empty() {
                blocks.push(vec![]);
            }
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: i + 1,
                column: 1,
                msg: format!("expected key = value, got {line:?}"),
            });
        };
        blocks.last_mut().unwrap().push((i + 1, k.trim(), v.trim()));
    }
    let mut out = Vec::new();
    for block in blocks.iter().filter(|b| !b.is_empty()) {
        out.extend(parse_block(block)?);
    }
    if out.is_empty() {
        return invalid("no scenarios found");
    }
    Ok(out)
}

fn parse_block(block: &[(usize, &str, &str)]) -> Result<Vec<PowerScenario>> {
    let mut base = PowerScenario::new(vec![], Detector::Bp, 1000, 1);
    let mut detectors = vec![];
    let mut n = None;
    let mut threshold = None;
    let mut window = None;
    for &(line, key, v) in block {
        match key {
            "name" => base.name = v.to_string(),
            "n" => n = Some(parse_num::<usize>(key, v, line)?),
            "segments" => {
                base.segments = v
                    .split(',')
                    .map(|seg| {
                        let (len, shift) = seg.trim().split_once(':').ok_or(Error::Parse {
                            line,
                            column: 1,
                            msg: format!("segment {seg:?} is not length:shift"),
                        })?;
                        Ok((
                            parse_num(key, len.trim(), line)?,
                            parse_num(key, shift.trim(), line)?,
                        ))
                    })
                    .collect::<Result<_>>()?
            }
            "detector" => {
                detectors = v.split(',').map(|d| d.parse()).collect::<Result<_>>()?;
            }
            "replicates" => base.replicates = parse_num(key, v, line)?,
            "seed" => base.seed = parse_num(key, v, line)?,
            "min_seg_frac" => base.bai_perron.min_seg_frac = parse_num(key, v, line)?,
            "kmax" => base.bai_perron.k_max = parse_num(key, v, line)?,
            "alpha" => base.cbs.alpha = parse_num(key, v, line)?,
            "nperm" => base.cbs.n_perm = parse_num(key, v, line)?,
            "early_stop" => base.cbs.early_stop = parse_num(key, v, line)?,
            "threshold" => threshold = Some(parse_num(key, v, line)?),
            "window" => window = Some(parse_num(key, v, line)?),
            "iterations" => base.bcp.iterations = parse_num(key, v, line)?,
            "burnin" => base.bcp.burnin = parse_num(key, v, line)?,
            other => {
                return Err(Error::Parse {
                    line,
                    column: 1,
                    msg: format!("unknown key {other:?}"),
                })
            }
        }
    }
    if detectors.is_empty() {
        return invalid("scenario has no detector");
    }
    base.n = base.segments.iter().map(|s| s.0).sum();
    if let Some(n) = n {
        if n != base.n {
            return invalid(format!("n = {n} but segments sum to {}", base.n));
        }
    }
    detectors
        .into_iter()
        .map(|d| {
            let mut sc = base.clone();
            sc.detector = d;
            sc.detection_rule = match (DetectionRule::default_for(d), threshold, window) {
                (
                    DetectionRule::PosteriorNear {
                        threshold: t0,
                        window: w0,
                    },
                    t,
                    w,
                ) => DetectionRule::PosteriorNear {
                    threshold: t.unwrap_or(t0),
                    window: w.unwrap_or(w0),
                },
                (rule, _, _) => rule,
            };
            sc.validate()?;
            Ok(sc)
        })
        .collect()
}

/// One row per result.
pub fn results_csv(results: &[PowerResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "label",
        "detector",
        "n",
        "segments",
        "replicates",
        "seed",
        "detections",
        "detection_rate",
        "mc_stderr",
    ])
    .expect("in-memory write");
    for r in results {
        let (det, n, segs, seed) = match &r.scenario {
            Some(sc) => (
                sc.detector.to_string(),
                sc.n.to_string(),
                sc.segments
                    .iter()
                    .map(|(l, s)| format!("{l}:{s}"))
                    .collect::<Vec<_>>()
                    .join(" "),
                sc.seed.to_string(),
            ),
            None => Default::default(),
        };
        w.write_record([
            r.label.clone(),
            det,
            n,
            segs,
            r.replicates.to_string(),
            seed,
            r.detections.to_string(),
            format!("{:.6}", r.detection_rate),
            format!("{:.6}", r.mc_stderr),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
