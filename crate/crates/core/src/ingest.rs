//! Series types, the two on-disk formats, and the preprocessing steps that
//! turn raw monthly records into the annual series every analysis consumes.
//!
//! Missing observations are carried as a boolean mask; the matching slot in
//! `values` holds `NaN` so that an accidental use shows up loudly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Sentinel used by the fixed-width monthly format for a missing month.
pub const MISSING_SENTINEL: f64 = -99.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Season {
    Summer,
    Winter,
    Annual,
    Raw,
}

impl Season {
    pub fn as_str(self) -> &'static str {
        match self {
            Season::Summer => "summer",
            Season::Winter => "winter",
            Season::Annual => "annual",
            Season::Raw => "raw",
        }
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Season {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "summer" => Ok(Season::Summer),
            "winter" => Ok(Season::Winter),
            "annual" => Ok(Season::Annual),
            "raw" => Ok(Season::Raw),
            other => invalid(format!("unknown season {other:?}")),
        }
    }
}

/// Year x month grid of monthly observations.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlySeries {
    pub name: String,
    pub first_year: i32,
    pub values: Vec<[f64; 12]>,
    pub missing: Vec<[bool; 12]>,
}

impl MonthlySeries {
    pub fn years(&self) -> usize {
        self.values.len()
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.values.len() as i32 - 1
    }

    /// Month value, `None` when flagged missing. `month` is 1-based.
    pub fn get(&self, year: i32, month: usize) -> Option<f64> {
        let row = usize::try_from(year - self.first_year).ok()?;
        let m = month.checked_sub(1)?;
        if row >= self.values.len() || m >= 12 || self.missing[row][m] {
            return None;
        }
        Some(self.values[row][m])
    }

    /// Serialize in the fixed-width layout read by [`parse_monthly_fixedwidth`].
    pub fn to_fixedwidth(&self) -> String {
        let mut out = String::new();
        for (i, (row, miss)) in self.values.iter().zip(&self.missing).enumerate() {
            out.push_str(&format!("{:4}", self.first_year + i as i32));
            for (v, m) in row.iter().zip(miss) {
                if *m {
                    out.push_str(&format!("  {MISSING_SENTINEL}"));
                } else {
                    out.push_str(&format!("  {v}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Named annual series; observation `t` belongs to year `first_year + t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualSeries {
    pub name: String,
    pub season: Season,
    pub first_year: i32,
    pub values: Vec<f64>,
    pub missing: Vec<bool>,
    pub unit: String,
}

impl AnnualSeries {
    /// A complete series (no missing values).
    pub fn new(name: impl Into<String>, season: Season, first_year: i32, values: Vec<f64>) -> Self {
        let missing = values.iter().map(|v| v.is_nan()).collect();
        AnnualSeries {
            name: name.into(),
            season,
            first_year,
            values,
            missing,
            unit: "degC".to_string(),
        }
    }

    /// Raw series starting at year 1, handy for simulated data.
    pub fn from_values(values: Vec<f64>) -> Self {
        AnnualSeries::new("series", Season::Raw, 1, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.values.len() as i32 - 1
    }

    pub fn year_of(&self, index: usize) -> i32 {
        self.first_year + index as i32
    }

    pub fn has_missing(&self) -> bool {
        self.missing.iter().any(|&m| m)
    }

    /// The value slice, or [`Error::MissingValues`] if any entry is missing.
    pub fn complete(&self) -> Result<&[f64]> {
        if self.has_missing() {
            return Err(Error::MissingValues);
        }
        Ok(&self.values)
    }

    fn with_values(&self, values: Vec<f64>) -> AnnualSeries {
        AnnualSeries {
            name: self.name.clone(),
            season: self.season,
            first_year: self.first_year,
            missing: vec![false; values.len()],
            values,
            unit: self.unit.clone(),
        }
    }

    /// Serialize as `year,value` CSV; missing values become empty fields.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(["year", "value"]).expect("in-memory write");
        for (i, (v, m)) in self.values.iter().zip(&self.missing).enumerate() {
            let value = if *m { String::new() } else { v.to_string() };
            w.write_record([self.year_of(i).to_string(), value])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 output")
    }
}

fn is_year_token(tok: &str) -> bool {
    tok.len() == 4 && tok.bytes().all(|b| b.is_ascii_digit())
}

/// Parse the whitespace-separated monthly format: a year column, twelve
/// monthly columns and an optional annual column, which is dropped.
/// Leading header lines are skipped until the first row starting with a
/// four-digit year.
pub fn parse_monthly_fixedwidth(text: &str) -> Result<MonthlySeries> {
    let mut first_year = None;
    let mut values = Vec::new();
    let mut missing = Vec::new();
    let mut in_body = false;

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if !in_body {
            if !is_year_token(tokens[0]) {
                continue;
            }
            in_body = true;
        }
        let year: i32 = tokens[0].parse().map_err(|_| Error::Parse {
            line: line_no,
            column: 1,
            msg: format!("expected a year, found {:?}", tokens[0]),
        })?;
        if tokens.len() < 13 {
            return Err(Error::Parse {
                line: line_no,
                column: tokens.len(),
                msg: format!("expected 12 monthly columns, found {}", tokens.len() - 1),
            });
        }
        if tokens.len() > 14 {
            return Err(Error::Parse {
                line: line_no,
                column: 15,
                msg: format!("unexpected extra columns ({} found)", tokens.len()),
            });
        }
        match first_year {
            None => {
                if year < 1 {
                    return Err(Error::Parse {
                        line: line_no,
                        column: 1,
                        msg: "year must be positive".into(),
                    });
                }
                first_year = Some(year);
            }
            Some(fy) => {
                let expected = fy + values.len() as i32;
                if year > expected {
                    return Err(Error::YearGap(expected));
                }
                if year == expected - 1 {
                    return Err(Error::DuplicateYear(year));
                }
                if year < expected {
                    return Err(Error::DescendingYear {
                        previous: expected - 1,
                        year,
                    });
                }
            }
        }
        let mut row = [f64::NAN; 12];
        let mut miss = [false; 12];
        for m in 0..12 {
            let tok = tokens[m + 1];
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                column: m + 2,
                msg: format!("non-numeric cell {tok:?}"),
            })?;
            if (v - MISSING_SENTINEL).abs() < 1e-9 {
                miss[m] = true;
            } else {
                row[m] = v;
            }
        }
        values.push(row);
        missing.push(miss);
    }

    let first_year = first_year.ok_or_else(|| Error::Parse {
        line: 0,
        column: 0,
        msg: "no data rows found".into(),
    })?;
    Ok(MonthlySeries {
        name: "monthly".into(),
        first_year,
        values,
        missing,
    })
}

/// Parse a two-column `year,value` CSV. Empty value fields are missing.
pub fn parse_annual_csv(text: &str) -> Result<AnnualSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        column: 1,
        msg: e.to_string(),
    })?;
    let header: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    if header != ["year", "value"] {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            msg: format!("expected header `year,value`, found {:?}", header.join(",")),
        });
    }

    let mut first_year: Option<i32> = None;
    let mut values = Vec::new();
    let mut missing = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            column: 1,
            msg: e.to_string(),
        })?;
        if rec.len() != 2 {
            return Err(Error::Parse {
                line,
                column: rec.len(),
                msg: "expected two fields".into(),
            });
        }
        let year: i32 = rec[0].parse().map_err(|_| Error::Parse {
            line,
            column: 1,
            msg: format!("invalid year {:?}", &rec[0]),
        })?;
        if let Some(fy) = first_year {
            let previous = fy + values.len() as i32 - 1;
            if year == previous {
                return Err(Error::DuplicateYear(year));
            }
            if year < previous {
                return Err(Error::DescendingYear { previous, year });
            }
            if year > previous + 1 {
                return Err(Error::YearGap(previous + 1));
            }
        } else {
            first_year = Some(year);
        }
        if rec[1].is_empty() {
            values.push(f64::NAN);
            missing.push(true);
        } else {
            let v: f64 = rec[1].parse().map_err(|_| Error::Parse {
                line,
                column: 2,
                msg: format!("non-numeric value {:?}", &rec[1]),
            })?;
            values.push(v);
            missing.push(false);
        }
    }
    let first_year = first_year.ok_or_else(|| Error::Parse {
        line: 2,
        column: 1,
        msg: "no data rows".into(),
    })?;
    Ok(AnnualSeries {
        name: "series".into(),
        season: Season::Raw,
        first_year,
        values,
        missing,
        unit: "degC".into(),
    })
}

/// Seasonal means: summer is June-August of the same year; winter is
/// December of the previous year plus January and February. Any missing
/// contributing month makes the seasonal value missing, and the first
/// winter is always missing.
pub fn seasonal_aggregate(m: &MonthlySeries, season: Season) -> Result<AnnualSeries> {
    if m.values.is_empty() {
        return invalid("monthly series is empty");
    }
    let cell = |row: usize, month: usize| -> Option<f64> {
        if m.missing[row][month] {
            None
        } else {
            Some(m.values[row][month])
        }
    };
    let n = m.values.len();
    let mut values = Vec::with_capacity(n);
    let mut missing = Vec::with_capacity(n);
    for row in 0..n {
        let parts: Option<[f64; 3]> = match season {
            Season::Summer => (|| Some([cell(row, 5)?, cell(row, 6)?, cell(row, 7)?]))(),
            Season::Winter => {
                if row == 0 {
                    None
                } else {
                    (|| Some([cell(row - 1, 11)?, cell(row, 0)?, cell(row, 1)?]))()
                }
            }
            other => return invalid(format!("cannot aggregate to season {other}")),
        };
        match parts {
            Some(p) => {
                values.push((p[0] + p[1] + p[2]) / 3.0);
                missing.push(false);
            }
            None => {
                values.push(f64::NAN);
                missing.push(true);
            }
        }
    }
    Ok(AnnualSeries {
        name: m.name.clone(),
        season,
        first_year: m.first_year,
        values,
        missing,
        unit: "degC".into(),
    })
}

pub(crate) fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Replace every missing value with the median of the observed values.
pub fn impute_median(s: &AnnualSeries) -> Result<AnnualSeries> {
    let mut observed: Vec<f64> = s
        .values
        .iter()
        .zip(&s.missing)
        .filter(|(_, &m)| !m)
        .map(|(&v, _)| v)
        .collect();
    if observed.is_empty() {
        return Err(Error::AllMissing);
    }
    observed.sort_by(f64::total_cmp);
    let med = median(&observed);
    let values = s
        .values
        .iter()
        .zip(&s.missing)
        .map(|(&v, &m)| if m { med } else { v })
        .collect();
    Ok(s.with_values(values))
}

/// Subtract the sample mean.
pub fn demean(s: &AnnualSeries) -> Result<AnnualSeries> {
    let y = s.complete()?;
    if y.is_empty() {
        return invalid("series is empty");
    }
    let mean = crate::stats::mean(y);
    Ok(s.with_values(y.iter().map(|v| v - mean).collect()))
}

/// Inclusive sub-series `from_year..=to_year`.
pub fn window(s: &AnnualSeries, from_year: i32, to_year: i32) -> Result<AnnualSeries> {
    if from_year > to_year || from_year < s.first_year || to_year > s.last_year() {
        return Err(Error::OutOfRange {
            from: from_year,
            to: to_year,
            first: s.first_year,
            last: s.last_year(),
        });
    }
    let a = (from_year - s.first_year) as usize;
    let b = (to_year - s.first_year) as usize + 1;
    Ok(AnnualSeries {
        name: s.name.clone(),
        season: s.season,
        first_year: from_year,
        values: s.values[a..b].to_vec(),
        missing: s.missing[a..b].to_vec(),
        unit: s.unit.clone(),
    })
}
