use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use icebreaker::ingest::{
    impute_median, parse_annual_csv, parse_monthly_fixedwidth, seasonal_aggregate, window,
};
use icebreaker::{AnnualSeries, Season};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Fixedwidth,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Series file; relative paths that do not exist are looked up under the
    /// data directory.
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to csv for `.csv` files and fixedwidth otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Season to aggregate monthly records into (annual when omitted).
    #[arg(long)]
    pub season: Option<Season>,
    #[arg(long)]
    pub from: Option<i32>,
    #[arg(long)]
    pub to: Option<i32>,
    /// Replace missing values by the series median.
    #[arg(long)]
    pub impute: bool,
}

pub fn resolve(path: &Path, data_dir: Option<&Path>) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(dir) = data_dir {
            return dir.join(path);
        }
    }
    path.to_path_buf()
}

/// Read a series file and apply season, window and imputation.
pub fn load_series(
    path: &Path,
    format: Option<Format>,
    season: Option<Season>,
    from: Option<i32>,
    to: Option<i32>,
    impute: bool,
) -> Result<AnnualSeries> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let format = format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Fixedwidth,
    });
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".into());
    let mut s = match format {
        Format::Csv => {
            let mut s =
                parse_annual_csv(&text).with_context(|| format!("parsing {}", path.display()))?;
            if let Some(season) = season {
                s.season = season;
            }
            s
        }
        Format::Fixedwidth => {
            let mut m = parse_monthly_fixedwidth(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            m.name = name.clone();
            seasonal_aggregate(&m, season.unwrap_or(Season::Annual))?
        }
    };
    s.name = name;
    if from.is_some() || to.is_some() {
        let lo = from.unwrap_or(s.first_year);
        let hi = to.unwrap_or(s.last_year());
        if lo > hi {
            bail!("--from {lo} is after --to {hi}");
        }
        s = window(&s, lo, hi)?;
    }
    if impute {
        s = impute_median(&s)?;
    }
    Ok(s)
}

impl InputArgs {
    pub fn load(&self, data_dir: Option<&Path>) -> Result<AnnualSeries> {
        let path = resolve(&self.input, data_dir);
        load_series(
            &path,
            self.format,
            self.season,
            self.from,
            self.to,
            self.impute,
        )
    }
}
