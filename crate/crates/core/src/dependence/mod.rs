//! Tests of the martingale difference hypothesis: robust automatic
//! portmanteau, automatic variance ratio with wild bootstrap, and the
//! generalized spectral test. The polynomial nonlinearity test lives in
//! [`crate::series`] but reports through the same [`DependenceReport`].

mod portmanteau;
mod spectral;
mod variance_ratio;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use portmanteau::{el_portmanteau, el_portmanteau_values, PortmanteauDetail};
pub use spectral::{gen_spectral, gen_spectral_values, spectral_statistic};
pub use variance_ratio::{
    avr_statistic, avr_test, avr_test_values, qs_kernel, variance_ratio, AvrDetail,
};

use crate::error::{invalid, Error, Result};
use crate::ingest::AnnualSeries;
use crate::series;
use crate::sim::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestKind {
    #[serde(rename = "Q")]
    Q,
    #[serde(rename = "AVR")]
    Avr,
    #[serde(rename = "SPEC")]
    Spec,
    #[serde(rename = "NONLIN")]
    Nonlin,
}

impl TestKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TestKind::Q => "Q",
            TestKind::Avr => "AVR",
            TestKind::Spec => "SPEC",
            TestKind::Nonlin => "NONLIN",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "Q" => Ok(TestKind::Q),
            "AVR" | "VR" => Ok(TestKind::Avr),
            "SPEC" => Ok(TestKind::Spec),
            "NONLIN" => Ok(TestKind::Nonlin),
            other => invalid(format!("unknown test {other:?}")),
        }
    }
}

/// Wild-bootstrap multiplier distribution (mean zero, unit variance).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplier {
    #[default]
    Normal,
    /// Two-point +1/-1 with equal probability.
    Rademacher,
}

impl Multiplier {
    pub fn draw(self, rng: &mut RngStream) -> f64 {
        match self {
            Multiplier::Normal => rng.normal(),
            Multiplier::Rademacher => {
                if rng.uniform() < 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
        }
    }
}

impl FromStr for Multiplier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" => Ok(Multiplier::Normal),
            "rademacher" | "two-point" => Ok(Multiplier::Rademacher),
            other => invalid(format!("unknown multiplier {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceReport {
    pub test: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    /// Selected lag for Q, bandwidth for AVR, lag order for NONLIN.
    pub chosen_lag: Option<usize>,
    pub bootstrap_reps: Option<usize>,
    pub window: (i32, i32),
    /// Degrees of freedom of the chi-squared reference, where one is used.
    pub dof: Option<f64>,
    /// Nonlinear terms removed as collinear (NONLIN only).
    pub dropped_terms: Option<usize>,
}

impl DependenceReport {
    pub(crate) fn new(test: TestKind, statistic: f64, p_value: f64, s: &AnnualSeries) -> Self {
        DependenceReport {
            test,
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            chosen_lag: None,
            bootstrap_reps: None,
            window: (s.first_year, s.last_year()),
            dof: None,
            dropped_terms: None,
        }
    }
}

/// Shared knobs for running any of the tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceConfig {
    pub bootstrap_reps: usize,
    pub seed: u64,
    pub multiplier: Multiplier,
    /// Upper bound for the portmanteau lag search; `None` means floor(sqrt(T)).
    pub max_lag_bound: Option<usize>,
    pub nonlin_order: usize,
}

impl Default for DependenceConfig {
    fn default() -> Self {
        DependenceConfig {
            bootstrap_reps: 500,
            seed: 1,
            multiplier: Multiplier::Normal,
            max_lag_bound: None,
            nonlin_order: 1,
        }
    }
}

/// Minimum series length accepted by every test in this module.
pub const MIN_LENGTH: usize = 30;

pub(crate) fn check_input(s: &AnnualSeries) -> Result<&[f64]> {
    let y = s.complete()?;
    if y.len() < MIN_LENGTH {
        return invalid(format!(
            "dependence tests need at least {MIN_LENGTH} observations, got {}",
            y.len()
        ));
    }
    if crate::stats::is_constant(y) {
        return Err(Error::ZeroVariance);
    }
    Ok(y)
}

pub fn run_test(
    kind: TestKind,
    s: &AnnualSeries,
    cfg: &DependenceConfig,
) -> Result<DependenceReport> {
    match kind {
        TestKind::Q => el_portmanteau(s, cfg.max_lag_bound),
        TestKind::Avr => avr_test(s, cfg.bootstrap_reps, cfg.seed, cfg.multiplier),
        TestKind::Spec => gen_spectral(s, cfg.bootstrap_reps, cfg.seed, cfg.multiplier),
        TestKind::Nonlin => series::terasvirta_nonlinearity(s, cfg.nonlin_order),
    }
}

/// Fit an AR(1) without trend and run `kind` on its residuals.
pub fn residual_recheck(
    s: &AnnualSeries,
    kind: TestKind,
    cfg: &DependenceConfig,
) -> Result<DependenceReport> {
    let y = check_input(s)?;
    let fit = series::ar_fit(y, 1)?;
    let resid = AnnualSeries {
        name: format!("{} AR(1) residuals", s.name),
        season: s.season,
        first_year: s.first_year + 1,
        missing: vec![false; fit.residuals.len()],
        values: fit.residuals,
        unit: s.unit.clone(),
    };
    run_test(kind, &resid, cfg)
}
