//! The analyses behind each subcommand. Every analysis takes an already
//! loaded series (or none), a parameter struct and a seed, and returns the
//! files it would write. The subcommands and the report runner share these.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use icebreaker::bayes::{
    barry_hartigan, gelman_rubin, hierarchical_anova_chains, icc_summary, AnovaConfig,
    AnovaPosterior, BcpConfig, Interval,
};
use icebreaker::changepoint::{bai_perron, cbs, BaiPerronConfig, CbsConfig};
use icebreaker::dependence::{residual_recheck, run_test, DependenceConfig, Multiplier, TestKind};
use icebreaker::ingest::{demean, window};
use icebreaker::series::{acf_values, ar1_trend_fit};
use icebreaker::sim::{parse_scenarios, published_scenarios, results_csv, run_power};
use icebreaker::smoothing::{
    loess_smooth, ma_transfer, ma_transfer_peak, moving_average, slutsky_demo, SlutskyConfig,
};
use icebreaker::{stats, AnnualSeries};
use serde::{Deserialize, Serialize};

use crate::output::Artifact;
use crate::svg::{Figure, Panel, Series, PALETTE};

pub const DEFAULT_SEED: u64 = 1;

/// Every analysis id known to the CLI and the report runner.
pub const ANALYSIS_IDS: [&str; 9] = [
    "ingest", "describe", "anova", "breaks", "mds", "ar1", "smooth", "slutsky", "power",
];

/// Whether an analysis reads a dataset.
pub fn needs_series(id: &str) -> bool {
    !matches!(id, "slutsky" | "power")
}

/// Empty cell for missing numbers, shortest round-trip form otherwise
/// (exponent form for very small or large magnitudes).
fn num(v: f64) -> String {
    if !v.is_finite() {
        String::new()
    } else if v != 0.0 && !(1e-4..1e15).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn points(s: &AnnualSeries, values: &[f64]) -> Vec<(f64, f64)> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| (s.year_of(i) as f64, v))
        .collect()
}

// ---------------------------------------------------------------- windows

/// Inclusive year range written `FROM:TO`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YearWindow {
    pub from: i32,
    pub to: i32,
}

impl FromStr for YearWindow {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("window {s:?} is not FROM:TO"))?;
        let from = a.trim().parse().map_err(|_| format!("bad year {a:?}"))?;
        let to = b.trim().parse().map_err(|_| format!("bad year {b:?}"))?;
        if from > to {
            return Err(format!("window {s:?} ends before it starts"));
        }
        Ok(YearWindow { from, to })
    }
}

impl TryFrom<String> for YearWindow {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<YearWindow> for String {
    fn from(w: YearWindow) -> String {
        format!("{}:{}", w.from, w.to)
    }
}

fn windows_of(s: &AnnualSeries, requested: &[YearWindow]) -> Result<Vec<AnnualSeries>> {
    if requested.is_empty() {
        return Ok(vec![s.clone()]);
    }
    requested
        .iter()
        .map(|w| window(s, w.from, w.to).map_err(Into::into))
        .collect()
}

// ---------------------------------------------------------------- ingest / describe

pub fn ingest(s: &AnnualSeries) -> Vec<Artifact> {
    vec![Artifact::new("series.csv", s.to_csv())]
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DescribeParams {
    /// Autocorrelation lags to report.
    #[arg(long, default_value_t = 5)]
    pub lags: usize,
}

impl Default for DescribeParams {
    fn default() -> Self {
        DescribeParams { lags: 5 }
    }
}

pub fn describe(s: &AnnualSeries, p: &DescribeParams) -> Result<Vec<Artifact>> {
    let observed: Vec<f64> = s
        .values
        .iter()
        .zip(&s.missing)
        .filter(|(_, &m)| !m)
        .map(|(&v, _)| v)
        .collect();
    if observed.is_empty() {
        bail!("series {} has no observed values", s.name);
    }
    let mut sorted = observed.clone();
    sorted.sort_by(f64::total_cmp);
    let mut rows: Vec<(String, String)> = vec![
        ("name".into(), s.name.clone()),
        ("season".into(), s.season.to_string()),
        ("first_year".into(), s.first_year.to_string()),
        ("last_year".into(), s.last_year().to_string()),
        ("n".into(), s.len().to_string()),
        ("missing".into(), (s.len() - observed.len()).to_string()),
        ("mean".into(), num(stats::mean(&observed))),
        ("sd".into(), num(stats::std_dev(&observed))),
        ("min".into(), num(sorted[0])),
        ("median".into(), num(stats::quantile_sorted(&sorted, 0.5))),
        ("max".into(), num(sorted[sorted.len() - 1])),
    ];
    // autocorrelations only make sense on a gap-free, non-constant series
    if let Ok(y) = s.complete() {
        let lags = p.lags.min(y.len().saturating_sub(1));
        if lags > 0 {
            if let Ok(acf) = acf_values(y, lags) {
                for (i, r) in acf.rho.iter().enumerate() {
                    rows.push((format!("acf_{}", i + 1), num(*r)));
                }
            }
        }
    }
    let mut out = String::from("statistic,value\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v}");
    }
    Ok(vec![Artifact::new("describe.csv", out)])
}

// ---------------------------------------------------------------- anova

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnovaParams {
    /// Years per block (10 for decades, 50 for half-centuries).
    #[arg(long, default_value_t = 10)]
    pub block_len: usize,
    /// Total sweeps per chain, burn-in included.
    #[arg(long, default_value_t = 10_000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 2_500)]
    pub burnin: usize,
    #[arg(long, default_value_t = 3)]
    pub chains: usize,
    /// Also write the retained draws of the first chain.
    #[arg(long)]
    pub draws: bool,
}

impl Default for AnovaParams {
    fn default() -> Self {
        AnovaParams {
            block_len: 10,
            iterations: 10_000,
            burnin: 2_500,
            chains: 3,
            draws: false,
        }
    }
}

fn pooled(chains: &[AnovaPosterior]) -> AnovaPosterior {
    let mut all = chains[0].clone();
    for c in &chains[1..] {
        all.alpha_draws.extend_from_slice(&c.alpha_draws);
        all.mu_draws.extend_from_slice(&c.mu_draws);
        all.sigma_w_draws.extend_from_slice(&c.sigma_w_draws);
        all.sigma_b_draws.extend_from_slice(&c.sigma_b_draws);
        all.icc_draws.extend_from_slice(&c.icc_draws);
    }
    all
}

pub fn anova(s: &AnnualSeries, p: &AnovaParams, seed: u64) -> Result<Vec<Artifact>> {
    if p.chains == 0 {
        bail!("need at least one chain");
    }
    let centred = demean(s)?;
    let cfg = AnovaConfig {
        block_len: p.block_len,
        iterations: p.iterations,
        burnin: p.burnin,
        seed,
    };
    let chains = hierarchical_anova_chains(&centred, &cfg, p.chains)?;
    let summary = icc_summary(&pooled(&chains))?;
    let psrf = |f: &dyn Fn(&AnovaPosterior) -> Vec<f64>| -> String {
        if chains.len() < 2 {
            return String::new();
        }
        let per: Vec<Vec<f64>> = chains.iter().map(f).collect();
        gelman_rubin(&per).map(num).unwrap_or_default()
    };

    let mut out = String::from("parameter,median,ci95_low,ci95_high,psrf\n");
    let mut row = |name: &str, iv: &Interval, r: String| {
        let _ = writeln!(
            out,
            "{name},{},{},{},{r}",
            num(iv.median),
            num(iv.ci95_low),
            num(iv.ci95_high)
        );
    };
    row("icc", &summary.icc, psrf(&|c| c.icc_draws.clone()));
    row(
        "sigma_w",
        &summary.sigma_w,
        psrf(&|c| c.sigma_w_draws.clone()),
    );
    row(
        "sigma_b",
        &summary.sigma_b,
        psrf(&|c| c.sigma_b_draws.clone()),
    );
    row("mu", &summary.mu, psrf(&|c| c.mu_draws.clone()));
    let starts = &chains[0].block_starts;
    for (j, iv) in summary.alpha.iter().enumerate() {
        let r = psrf(&|c| c.alpha_draws.iter().map(|d| d[j]).collect());
        row(&format!("alpha_{}", starts[j]), iv, r);
    }
    let mut files = vec![Artifact::new("anova.csv", out)];

    if p.draws {
        let c = &chains[0];
        let mut d = String::from("draw,mu,sigma_w,sigma_b,icc");
        for y in starts {
            let _ = write!(d, ",alpha_{y}");
        }
        d.push('\n');
        for i in 0..c.mu_draws.len() {
            let _ = write!(
                d,
                "{i},{},{},{},{}",
                num(c.mu_draws[i]),
                num(c.sigma_w_draws[i]),
                num(c.sigma_b_draws[i]),
                num(c.icc_draws[i])
            );
            for a in &c.alpha_draws[i] {
                let _ = write!(d, ",{}", num(*a));
            }
            d.push('\n');
        }
        files.push(Artifact::new("anova_draws.csv", d));
    }

    // block effects drawn at block mid-years
    let half = (p.block_len as f64 - 1.0) / 2.0;
    let mids: Vec<(f64, f64)> = summary
        .alpha
        .iter()
        .zip(starts)
        .map(|(iv, &y)| (y as f64 + half, iv.median))
        .collect();
    let bands: Vec<(f64, f64, f64)> = summary
        .alpha
        .iter()
        .zip(starts)
        .map(|(iv, &y)| (y as f64 + half, iv.ci95_low, iv.ci95_high))
        .collect();
    let values = centred.complete()?;
    let fig = Figure {
        title: format!("{}: block effects, {}-year blocks", s.name, p.block_len),
        x_label: "year".into(),
        panels: vec![
            Panel {
                y_label: "demeaned value".into(),
                series: vec![Series::line(&s.name, PALETTE[0], points(&centred, values))],
                ..Panel::default()
            },
            Panel {
                y_label: "block effect (95% interval)".into(),
                series: vec![
                    Series::line(
                        "zero",
                        PALETTE[0],
                        vec![(mids[0].0, 0.0), (mids[mids.len() - 1].0, 0.0)],
                    ),
                    Series::intervals("alpha", PALETTE[2], bands, mids),
                ],
                ..Panel::default()
            },
        ],
    };
    files.push(Artifact::new("anova.svg", fig.render()));
    Ok(files)
}

// ---------------------------------------------------------------- breaks

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BreaksParams {
    /// Minimum segment length as a fraction of the series.
    #[arg(long = "min-seg", default_value_t = 0.15)]
    pub min_seg: f64,
    #[arg(long, default_value_t = 5)]
    pub kmax: usize,
    /// Significance level for accepting a segmentation split.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1000)]
    pub nperm: usize,
    /// Skip permutations once a split can no longer be accepted.
    #[arg(long)]
    pub early_stop: bool,
    /// Posterior sweeps, burn-in included.
    #[arg(long = "bcp-iterations", default_value_t = 550)]
    pub bcp_iterations: usize,
    #[arg(long = "bcp-burnin", default_value_t = 50)]
    pub bcp_burnin: usize,
    #[arg(long, default_value_t = 0.2)]
    pub p0: f64,
    #[arg(long, default_value_t = 0.2)]
    pub w0: f64,
    /// Posterior change probability at which a year is listed.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

impl Default for BreaksParams {
    fn default() -> Self {
        BreaksParams {
            min_seg: 0.15,
            kmax: 5,
            alpha: 0.01,
            nperm: 1000,
            early_stop: false,
            bcp_iterations: 550,
            bcp_burnin: 50,
            p0: 0.2,
            w0: 0.2,
            threshold: 0.5,
        }
    }
}

pub fn breaks(s: &AnnualSeries, p: &BreaksParams, seed: u64) -> Result<Vec<Artifact>> {
    let y = s.complete()?;
    let bp = bai_perron(
        s,
        &BaiPerronConfig {
            min_seg_frac: p.min_seg,
            k_max: p.kmax,
        },
    )
    .context("Bai-Perron")?;
    let vo = cbs(
        s,
        &CbsConfig {
            alpha: p.alpha,
            n_perm: p.nperm,
            seed,
            early_stop: p.early_stop,
            ..CbsConfig::default()
        },
    )
    .context("circular binary segmentation")?;
    let bh = barry_hartigan(
        s,
        &BcpConfig {
            iterations: p.bcp_iterations,
            burnin: p.bcp_burnin,
            p0: p.p0,
            w0: p.w0,
            seed,
        },
    )
    .context("Barry-Hartigan")?;

    let mut out = String::from("method,break_year,p_value,criterion\n");
    let bic = bp.bic_by_k[bp.chosen_k];
    for y in &bp.break_years {
        let _ = writeln!(out, "BP,{y},,{}", num(bic));
    }
    for (y, pv) in vo.changepoints.iter().zip(&vo.p_values) {
        let _ = writeln!(out, "CBS,{y},{},", num(*pv));
    }
    for (i, &pr) in bh.change_prob.iter().enumerate() {
        if pr >= p.threshold && pr > 0.0 {
            let _ = writeln!(out, "BH,{},,{}", s.year_of(i), num(pr));
        }
    }

    let mut post = String::from("year,value,posterior_mean,change_prob\n");
    for i in 0..y.len() {
        let _ = writeln!(
            post,
            "{},{},{},{}",
            s.year_of(i),
            num(y[i]),
            num(bh.posterior_mean[i]),
            num(bh.change_prob[i])
        );
    }

    let markers: Vec<f64> = bp.break_years.iter().map(|&y| y as f64 + 0.5).collect();
    let fig = Figure {
        title: format!("{}: change points", s.name),
        x_label: "year".into(),
        panels: vec![
            Panel {
                y_label: "value".into(),
                series: vec![
                    Series::line(&s.name, PALETTE[0], points(s, y)),
                    Series::line("posterior mean", PALETTE[1], points(s, &bh.posterior_mean)),
                ],
                markers,
                ..Panel::default()
            },
            Panel {
                y_label: "posterior change probability".into(),
                series: vec![Series::bars(
                    "probability",
                    PALETTE[2],
                    points(s, &bh.change_prob),
                )],
                y_range: Some((0.0, 1.0)),
                ..Panel::default()
            },
        ],
    };
    Ok(vec![
        Artifact::new("breaks.csv", out),
        Artifact::new("bcp.csv", post),
        Artifact::new("breaks.svg", fig.render()),
    ])
}

// ---------------------------------------------------------------- mds

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MdsParams {
    /// Year window FROM:TO; repeat for several. Whole series when omitted.
    #[arg(long = "window")]
    pub windows: Vec<YearWindow>,
    /// Add the polynomial nonlinearity test.
    #[arg(long)]
    pub nonlin: bool,
    /// Lag order of the nonlinearity test.
    #[arg(long, default_value_t = 1)]
    pub nonlin_order: usize,
    /// Wild-bootstrap replications.
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    /// Bootstrap multiplier: normal or rademacher.
    #[arg(long, default_value = "normal")]
    pub multiplier: Multiplier,
    /// Upper bound for the portmanteau lag search (default floor(sqrt(T))).
    #[arg(long)]
    pub lag_bound: Option<usize>,
    /// Repeat every test on AR(1) residuals.
    #[arg(long)]
    pub residuals: bool,
}

impl Default for MdsParams {
    fn default() -> Self {
        MdsParams {
            windows: vec![],
            nonlin: false,
            nonlin_order: 1,
            reps: 500,
            multiplier: Multiplier::Normal,
            lag_bound: None,
            residuals: false,
        }
    }
}

pub fn mds(s: &AnnualSeries, p: &MdsParams, seed: u64) -> Result<Vec<Artifact>> {
    let cfg = DependenceConfig {
        bootstrap_reps: p.reps,
        seed,
        multiplier: p.multiplier,
        max_lag_bound: p.lag_bound,
        nonlin_order: p.nonlin_order,
    };
    let mut tests = vec![TestKind::Q, TestKind::Avr, TestKind::Spec];
    if p.nonlin {
        tests.push(TestKind::Nonlin);
    }
    let mut out = String::from("window_from,window_to,input,test,statistic,p_value,chosen_lag\n");
    for w in windows_of(s, &p.windows)? {
        let (from, to) = (w.first_year, w.last_year());
        for &t in &tests {
            let r = run_test(t, &w, &cfg).with_context(|| format!("{t} on {from}-{to}"))?;
            let _ = writeln!(
                out,
                "{from},{to},series,{t},{},{},{}",
                num(r.statistic),
                num(r.p_value),
                opt(r.chosen_lag)
            );
        }
        if p.residuals {
            for &t in &tests {
                let r = residual_recheck(&w, t, &cfg)
                    .with_context(|| format!("{t} on residuals {from}-{to}"))?;
                let _ = writeln!(
                    out,
                    "{from},{to},ar1_residuals,{t},{},{},{}",
                    num(r.statistic),
                    num(r.p_value),
                    opt(r.chosen_lag)
                );
            }
        }
    }
    Ok(vec![Artifact::new("mds.csv", out)])
}

// ---------------------------------------------------------------- ar1

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ar1Params {
    /// Year window FROM:TO; repeat for several. Whole series when omitted.
    #[arg(long = "window")]
    pub windows: Vec<YearWindow>,
}

pub fn ar1(s: &AnnualSeries, p: &Ar1Params) -> Result<Vec<Artifact>> {
    let mut out = String::from("window_from,window_to,parameter,estimate,std_error,p_value\n");
    for w in windows_of(s, &p.windows)? {
        let (from, to) = (w.first_year, w.last_year());
        let fit = ar1_trend_fit(&w).with_context(|| format!("AR(1) fit on {from}-{to}"))?;
        for (i, name) in ["alpha", "beta", "gamma"].iter().enumerate() {
            let _ = writeln!(
                out,
                "{from},{to},{name},{},{},{}",
                num(fit.coefficients[i]),
                num(fit.std_errors[i]),
                num(fit.p_value(i))
            );
        }
        let _ = writeln!(out, "{from},{to},rmse,{},,", num(fit.rmse));
        let _ = writeln!(out, "{from},{to},r2,{},,", num(fit.r2));
        let _ = writeln!(out, "{from},{to},n,{},,", fit.n);
    }
    Ok(vec![Artifact::new("ar1.csv", out)])
}

// ---------------------------------------------------------------- smooth

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothParams {
    /// Moving-average lengths (comma separated).
    #[arg(long = "ma", value_delimiter = ',', default_values_t = [10, 25])]
    pub ma: Vec<usize>,
    /// Loess span as a fraction of the series.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub span: f64,
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
    /// Frequencies on (0, pi] in the transfer-function table.
    #[arg(long, default_value_t = 500)]
    pub grid: usize,
}

impl Default for SmoothParams {
    fn default() -> Self {
        SmoothParams {
            ma: vec![10, 25],
            span: 1.0 / 3.0,
            degree: 2,
            grid: 500,
        }
    }
}

pub fn smooth(s: &AnnualSeries, p: &SmoothParams) -> Result<Vec<Artifact>> {
    let y = s.complete()?;
    let mas =
        p.ma.iter()
            .map(|&m| moving_average(s, m))
            .collect::<icebreaker::Result<Vec<_>>>()?;
    let lo = loess_smooth(s, p.span, p.degree)?;

    let mut out = String::from("year,value");
    for m in &p.ma {
        let _ = write!(out, ",ma{m}");
    }
    out.push_str(",loess\n");
    for i in 0..y.len() {
        let _ = write!(out, "{},{}", s.year_of(i), num(y[i]));
        for ma in &mas {
            let _ = write!(
                out,
                ",{}",
                if ma.valid[i] {
                    num(ma.values[i])
                } else {
                    String::new()
                }
            );
        }
        let _ = writeln!(
            out,
            ",{}",
            if lo.valid[i] {
                num(lo.values[i])
            } else {
                String::new()
            }
        );
    }

    let mut tf = String::from("m,omega,period,gain\n");
    let mut peaks = String::from("m,omega,period,gain\n");
    for &m in &p.ma {
        for k in 1..=p.grid {
            let w = std::f64::consts::PI * k as f64 / p.grid as f64;
            let _ = writeln!(
                tf,
                "{m},{},{},{}",
                num(w),
                num(2.0 * std::f64::consts::PI / w),
                num(ma_transfer(m, w))
            );
        }
        if let Ok(pk) = ma_transfer_peak(m) {
            let _ = writeln!(
                peaks,
                "{m},{},{},{}",
                num(pk.omega),
                num(pk.period),
                num(pk.gain)
            );
        }
    }

    let mut series = vec![Series::line(&s.name, "#bbbbbb", points(s, y))];
    for (k, ma) in mas.iter().enumerate() {
        series.push(Series::line(
            &format!("{}-term moving average", p.ma[k]),
            PALETTE[(k + 1) % PALETTE.len()],
            points(s, &ma.values),
        ));
    }
    series.push(Series::line("loess", PALETTE[4], points(s, &lo.values)));
    let fig = Figure {
        title: format!("{}: smooths", s.name),
        x_label: "year".into(),
        panels: vec![Panel {
            y_label: "value".into(),
            series,
            ..Panel::default()
        }],
    };
    Ok(vec![
        Artifact::new("smooth.csv", out),
        Artifact::new("smooth.svg", fig.render()),
        Artifact::new("transfer.csv", tf),
        Artifact::new("transfer_peak.csv", peaks),
    ])
}

// ---------------------------------------------------------------- slutsky

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlutskyParams {
    /// Length of the white-noise series.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long = "ma", value_delimiter = ',', default_values_t = [10, 25])]
    pub ma: Vec<usize>,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub span: f64,
    #[arg(long = "bcp-iterations", default_value_t = 550)]
    pub bcp_iterations: usize,
    #[arg(long = "bcp-burnin", default_value_t = 50)]
    pub bcp_burnin: usize,
}

impl Default for SlutskyParams {
    fn default() -> Self {
        SlutskyParams {
            n: 500,
            ma: vec![10, 25],
            span: 1.0 / 3.0,
            bcp_iterations: 550,
            bcp_burnin: 50,
        }
    }
}

pub fn slutsky(p: &SlutskyParams, seed: u64) -> Result<Vec<Artifact>> {
    let cfg = SlutskyConfig {
        n: p.n,
        seed,
        ma_windows: p.ma.clone(),
        span: p.span,
        first_year: 1,
        bcp: BcpConfig {
            iterations: p.bcp_iterations,
            burnin: p.bcp_burnin,
            seed,
            ..BcpConfig::default()
        },
    };
    let demo = slutsky_demo(&cfg)?;
    let raw = demo.raw.complete()?;
    let mut smooths = vec![];
    for (k, ma) in demo.ma.iter().enumerate() {
        smooths.push(Series::line(
            &format!("{}-term moving average", p.ma[k]),
            PALETTE[(k + 1) % PALETTE.len()],
            points(&demo.raw, &ma.values),
        ));
    }
    smooths.push(Series::line(
        "loess",
        PALETTE[4],
        points(&demo.raw, &demo.loess.values),
    ));
    smooths.push(Series::line(
        "posterior mean",
        PALETTE[5],
        points(&demo.raw, &demo.bcp.posterior_mean),
    ));
    let fig = Figure {
        title: format!("white noise, n = {}", p.n),
        x_label: "t".into(),
        panels: vec![
            Panel {
                y_label: "raw".into(),
                series: vec![Series::line("N(0,1)", PALETTE[0], points(&demo.raw, raw))],
                ..Panel::default()
            },
            Panel {
                y_label: "smoothed".into(),
                series: smooths,
                ..Panel::default()
            },
            Panel {
                y_label: "posterior change probability".into(),
                series: vec![Series::bars(
                    "probability",
                    PALETTE[2],
                    points(&demo.raw, &demo.bcp.change_prob),
                )],
                y_range: Some((0.0, 1.0)),
                ..Panel::default()
            },
        ],
    };
    Ok(vec![
        Artifact::new("slutsky.csv", demo.to_csv()),
        Artifact::new("slutsky.svg", fig.render()),
    ])
}

// ---------------------------------------------------------------- power

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerParams {
    /// Scenario file (key = value blocks separated by blank lines).
    #[arg(long)]
    pub scenario: Option<std::path::PathBuf>,
    /// Run the built-in table of published designs.
    #[arg(long)]
    pub table: bool,
    /// Override the replicate count of every scenario.
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Enable permutation early stopping for segmentation scenarios.
    #[arg(long)]
    pub early_stop: bool,
}

impl Default for PowerParams {
    fn default() -> Self {
        PowerParams {
            scenario: None,
            table: false,
            replicates: None,
            early_stop: false,
        }
    }
}

pub fn power(p: &PowerParams, seed: Option<u64>, base: Option<&Path>) -> Result<Vec<Artifact>> {
    let mut scenarios = match (&p.scenario, p.table) {
        (Some(_), true) => bail!("give either a scenario file or --table, not both"),
        (None, false) => bail!("no scenarios: give a scenario file or --table"),
        (Some(path), false) => {
            let path = crate::input::resolve(path, base);
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            parse_scenarios(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, true) => published_scenarios(1000, seed.unwrap_or(DEFAULT_SEED)),
    };
    for sc in &mut scenarios {
        if let Some(r) = p.replicates {
            sc.replicates = r;
        }
        if let Some(s) = seed {
            sc.seed = s;
        }
        if p.early_stop {
            sc.cbs.early_stop = true;
        }
    }
    let results = scenarios
        .iter()
        .map(|sc| {
            let r = run_power(sc).with_context(|| format!("scenario {:?}", sc.name))?;
            eprintln!(
                "{} [{}]: {:.1}% ({} reps)",
                r.label,
                sc.detector,
                100.0 * r.detection_rate,
                r.replicates
            );
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![Artifact::new("power.csv", results_csv(&results))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[derive(Parser)]
    struct Wrap<T: Args> {
        #[command(flatten)]
        inner: T,
    }

    fn parsed<T: Args>() -> T {
        Wrap::<T>::try_parse_from(["x"]).unwrap().inner
    }

    #[test]
    fn flag_defaults_match_config_defaults() {
        assert_eq!(parsed::<DescribeParams>(), DescribeParams::default());
        assert_eq!(parsed::<AnovaParams>(), AnovaParams::default());
        assert_eq!(parsed::<BreaksParams>(), BreaksParams::default());
        assert_eq!(parsed::<MdsParams>(), MdsParams::default());
        assert_eq!(parsed::<Ar1Params>(), Ar1Params::default());
        assert_eq!(parsed::<SmoothParams>(), SmoothParams::default());
        assert_eq!(parsed::<SlutskyParams>(), SlutskyParams::default());
        assert_eq!(parsed::<PowerParams>(), PowerParams::default());
    }

    #[test]
    fn library_defaults_agree() {
        let b = BreaksParams::default();
        let bp = BaiPerronConfig::default();
        let c = CbsConfig::default();
        let bh = BcpConfig::default();
        assert_eq!((b.min_seg, b.kmax), (bp.min_seg_frac, bp.k_max));
        assert_eq!(
            (b.alpha, b.nperm, b.early_stop),
            (c.alpha, c.n_perm, c.early_stop)
        );
        assert_eq!(
            (b.bcp_iterations, b.bcp_burnin, b.p0, b.w0),
            (bh.iterations, bh.burnin, bh.p0, bh.w0)
        );
        let a = AnovaParams::default();
        let ac = AnovaConfig::default();
        assert_eq!(
            (a.block_len, a.iterations, a.burnin),
            (ac.block_len, ac.iterations, ac.burnin)
        );
        let s = SlutskyParams::default();
        let sc = SlutskyConfig::default();
        assert_eq!((s.n, &s.ma, s.span), (sc.n, &sc.ma_windows, sc.span));
        assert_eq!(
            MdsParams::default().reps,
            DependenceConfig::default().bootstrap_reps
        );
    }

    #[test]
    fn windows_parse() {
        assert_eq!(
            "1701:1900".parse::<YearWindow>().unwrap(),
            YearWindow {
                from: 1701,
                to: 1900
            }
        );
        assert!("1900:1701".parse::<YearWindow>().is_err());
        assert!("1900".parse::<YearWindow>().is_err());
        let p: MdsParams = toml::from_str(r#"windows = ["1701:1800", "1801:1900"]"#).unwrap();
        assert_eq!(p.windows.len(), 2);
        assert!(toml::from_str::<MdsParams>("bogus = 1").is_err());
    }
}
