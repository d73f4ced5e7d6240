//! One-shot report: load every dataset named in a TOML config, run the
//! listed analyses, write their outputs and a `manifest.json` describing
//! what ran with which parameters, plus a hash of every file.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use icebreaker::{AnnualSeries, Season};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{self, needs_series, ANALYSIS_IDS, DEFAULT_SEED};
use crate::input::{load_series, resolve, Format};
use crate::output::{Artifact, OutputDir, Written};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub name: String,
    pub path: PathBuf,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub season: Option<Season>,
    #[serde(default)]
    pub from: Option<i32>,
    #[serde(default)]
    pub to: Option<i32>,
    #[serde(default)]
    pub impute: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    pub id: String,
    /// Prefix for output names; defaults to the id. Must be unique.
    #[serde(default)]
    pub label: Option<String>,
    /// Datasets to run on; all of them when omitted.
    #[serde(default)]
    pub datasets: Option<Vec<String>>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: toml::Table,
}

impl AnalysisSpec {
    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    pub output_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub datasets: Vec<DatasetSpec>,
    #[serde(default)]
    pub analyses: Vec<AnalysisSpec>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Parameters of one analysis after defaults are filled in.
#[derive(Debug, Clone, PartialEq)]
enum Params {
    Ingest,
    Describe(analysis::DescribeParams),
    Anova(analysis::AnovaParams),
    Breaks(analysis::BreaksParams),
    Mds(analysis::MdsParams),
    Ar1(analysis::Ar1Params),
    Smooth(analysis::SmoothParams),
    Slutsky(analysis::SlutskyParams),
    Power(analysis::PowerParams),
}

fn parse_params(id: &str, table: &toml::Table) -> Result<Params> {
    let v = toml::Value::Table(table.clone());
    Ok(match id {
        "ingest" => {
            if !table.is_empty() {
                bail!("ingest takes no parameters");
            }
            Params::Ingest
        }
        "describe" => Params::Describe(v.try_into()?),
        "anova" => Params::Anova(v.try_into()?),
        "breaks" => Params::Breaks(v.try_into()?),
        "mds" => Params::Mds(v.try_into()?),
        "ar1" => Params::Ar1(v.try_into()?),
        "smooth" => Params::Smooth(v.try_into()?),
        "slutsky" => Params::Slutsky(v.try_into()?),
        "power" => Params::Power(v.try_into()?),
        other => bail!(
            "unknown analysis id {other:?}; known ids: {}",
            ANALYSIS_IDS.join(", ")
        ),
    })
}

impl Params {
    fn to_json(&self) -> Value {
        let r = match self {
            Params::Ingest => Ok(json!({})),
            Params::Describe(p) => serde_json::to_value(p),
            Params::Anova(p) => serde_json::to_value(p),
            Params::Breaks(p) => serde_json::to_value(p),
            Params::Mds(p) => serde_json::to_value(p),
            Params::Ar1(p) => serde_json::to_value(p),
            Params::Smooth(p) => serde_json::to_value(p),
            Params::Slutsky(p) => serde_json::to_value(p),
            Params::Power(p) => serde_json::to_value(p),
        };
        r.unwrap_or(Value::Null)
    }

    fn run(&self, s: Option<&AnnualSeries>, seed: u64, base: &Path) -> Result<Vec<Artifact>> {
        let series = || s.context("analysis needs a dataset");
        match self {
            Params::Ingest => Ok(analysis::ingest(series()?)),
            Params::Describe(p) => analysis::describe(series()?, p),
            Params::Anova(p) => analysis::anova(series()?, p, seed),
            Params::Breaks(p) => analysis::breaks(series()?, p, seed),
            Params::Mds(p) => analysis::mds(series()?, p, seed),
            Params::Ar1(p) => analysis::ar1(series()?, p),
            Params::Smooth(p) => analysis::smooth(series()?, p),
            Params::Slutsky(p) => analysis::slutsky(p, seed),
            Params::Power(p) => analysis::power(p, Some(seed), Some(base)),
        }
    }
}

impl ReportConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Check paths, ids, labels and parameters. Relative dataset paths are
    /// taken relative to `base` first and the data directory second.
    pub fn validate(&self, base: &Path, data_dir: Option<&Path>) -> Result<()> {
        let mut names = BTreeSet::new();
        for d in &self.datasets {
            if !names.insert(d.name.as_str()) {
                bail!("dataset name {:?} used twice", d.name);
            }
            let path = dataset_path(&d.path, base, data_dir);
            if !path.is_file() {
                bail!(
                    "dataset {:?}: file {} does not exist",
                    d.name,
                    path.display()
                );
            }
        }
        let mut labels = BTreeSet::new();
        for a in &self.analyses {
            if !ANALYSIS_IDS.contains(&a.id.as_str()) {
                bail!(
                    "unknown analysis id {:?}; known ids: {}",
                    a.id,
                    ANALYSIS_IDS.join(", ")
                );
            }
            if !labels.insert(a.label()) {
                bail!(
                    "analysis label {:?} used twice; set `label` to tell them apart",
                    a.label()
                );
            }
            parse_params(&a.id, &a.params)
                .with_context(|| format!("parameters of analysis {:?}", a.label()))?;
            if let Some(ds) = &a.datasets {
                for n in ds {
                    if !names.contains(n.as_str()) {
                        bail!("analysis {:?} refers to unknown dataset {n:?}", a.label());
                    }
                }
            }
            if needs_series(&a.id) && self.datasets.is_empty() {
                bail!(
                    "analysis {:?} needs a dataset but none are configured",
                    a.label()
                );
            }
        }
        Ok(())
    }
}

fn dataset_path(p: &Path, base: &Path, data_dir: Option<&Path>) -> PathBuf {
    if p.is_absolute() {
        return p.to_path_buf();
    }
    let local = base.join(p);
    if local.exists() {
        local
    } else {
        resolve(p, data_dir)
    }
}

#[derive(Debug, Clone, Serialize)]
struct RunRecord {
    label: String,
    id: String,
    dataset: Option<String>,
    seed: u64,
    status: &'static str,
    error: Option<String>,
    params: Value,
    outputs: Vec<Written>,
}

/// Outcome of a report run; `failures` counts analyses that did not finish.
pub struct ReportOutcome {
    pub output_dir: PathBuf,
    pub failures: usize,
}

/// Run a validated config. Outputs land in `output_dir` (relative to
/// `base` when not absolute) unless `out_override` is given.
pub fn run_report(
    cfg: &ReportConfig,
    base: &Path,
    data_dir: Option<&Path>,
    out_override: Option<&Path>,
) -> Result<ReportOutcome> {
    cfg.validate(base, data_dir)?;
    let out_path = match out_override {
        Some(p) => p.to_path_buf(),
        None if cfg.output_dir.is_absolute() => cfg.output_dir.clone(),
        None => base.join(&cfg.output_dir),
    };
    let mut out = OutputDir::create(&out_path)?;

    let mut loaded: BTreeMap<&str, std::result::Result<AnnualSeries, String>> = BTreeMap::new();
    for d in &cfg.datasets {
        let path = dataset_path(&d.path, base, data_dir);
        let s = load_series(&path, d.format, d.season, d.from, d.to, d.impute)
            .map(|mut s| {
                s.name = d.name.clone();
                s
            })
            .map_err(|e| format!("{e:#}"));
        loaded.insert(d.name.as_str(), s);
    }

    let mut records = vec![];
    for a in &cfg.analyses {
        let params = parse_params(&a.id, &a.params)?;
        let seed = a.seed.unwrap_or(cfg.seed);
        let targets: Vec<Option<&str>> = if !needs_series(&a.id) {
            vec![None]
        } else {
            match &a.datasets {
                Some(ds) => ds.iter().map(|s| Some(s.as_str())).collect(),
                None => cfg.datasets.iter().map(|d| Some(d.name.as_str())).collect(),
            }
        };
        for target in targets {
            let prefix = match target {
                Some(ds) => format!("{}_{ds}_", a.label()),
                None => format!("{}_", a.label()),
            };
            let result = match target {
                Some(ds) => match &loaded[ds] {
                    Ok(s) => params.run(Some(s), seed, base),
                    Err(e) => Err(anyhow::anyhow!("loading dataset {ds}: {e}")),
                },
                None => params.run(None, seed, base),
            };
            let mut rec = RunRecord {
                label: a.label().to_string(),
                id: a.id.clone(),
                dataset: target.map(str::to_string),
                seed,
                status: "ok",
                error: None,
                params: params.to_json(),
                outputs: vec![],
            };
            match result {
                Ok(files) => {
                    for f in files {
                        let named = Artifact::new(format!("{prefix}{}", f.name), f.content);
                        rec.outputs.push(out.write(&named)?);
                    }
                }
                Err(e) => {
                    eprintln!("analysis {} failed: {e:#}", prefix.trim_end_matches('_'));
                    rec.status = "failed";
                    rec.error = Some(format!("{e:#}"));
                }
            }
            records.push(rec);
        }
    }

    let failures = records.iter().filter(|r| r.status != "ok").count();
    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": { "name": "icebreaker", "version": env!("CARGO_PKG_VERSION") },
        "seed": cfg.seed,
        "status": if failures == 0 { "ok" } else { "failed" },
        "config": cfg,
        "analyses": records,
    });
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    std::fs::write(out_path.join("manifest.json"), text)
        .with_context(|| format!("cannot write manifest in {}", out_path.display()))?;
    Ok(ReportOutcome {
        output_dir: out_path,
        failures,
    })
}
