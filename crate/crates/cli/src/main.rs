use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

mod analysis;
mod input;
mod output;
mod report;
mod svg;

use analysis::DEFAULT_SEED;
use input::InputArgs;
use output::{Artifact, OutputDir};

/// Change-point and serial-dependence analysis of annual climate series.
#[derive(Parser, Debug)]
#[command(name = "icebreaker", version)]
struct Cli {
    /// Root for relative dataset paths that do not exist as given.
    #[arg(long, global = true, env = "ICEBREAKER_DATA_DIR")]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and aggregate a series and write it as year,value CSV.
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Summary statistics and autocorrelations.
    Describe {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        params: analysis::DescribeParams,
    },
    /// Hierarchical one-way ANOVA over blocks of years.
    Anova {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: analysis::AnovaParams,
    },
    /// Bai-Perron, circular binary segmentation and Barry-Hartigan.
    Breaks {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: analysis::BreaksParams,
    },
    /// Martingale difference tests (Q, AVR, SPEC) per window.
    Mds {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: analysis::MdsParams,
    },
    /// AR(1) with linear trend.
    Ar1 {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        params: analysis::Ar1Params,
    },
    /// Moving averages, loess and moving-average transfer functions.
    Smooth {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        params: analysis::SmoothParams,
    },
    /// Smooths and change-point posterior of simulated white noise.
    Slutsky {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Seed of the simulated series.
        #[arg(long, default_value_t = 123)]
        seed: u64,
        #[command(flatten)]
        params: analysis::SlutskyParams,
    },
    /// Monte Carlo detection rates of the change-point methods.
    Power {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides the seed of every scenario.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        params: analysis::PowerParams,
    },
    /// Run every analysis listed in a TOML config.
    Report {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: &Path, files: Vec<Artifact>) -> Result<()> {
    OutputDir::create(out)?.write_all(&files)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let dd = cli.data_dir.as_deref();
    match cli.command {
        Command::Ingest { input, out } => emit(&out, analysis::ingest(&input.load(dd)?))?,
        Command::Describe { input, out, params } => {
            emit(&out, analysis::describe(&input.load(dd)?, &params)?)?
        }
        Command::Anova {
            input,
            common,
            params,
        } => emit(
            &common.out,
            analysis::anova(&input.load(dd)?, &params, common.seed)?,
        )?,
        Command::Breaks {
            input,
            common,
            params,
        } => emit(
            &common.out,
            analysis::breaks(&input.load(dd)?, &params, common.seed)?,
        )?,
        Command::Mds {
            input,
            common,
            params,
        } => emit(
            &common.out,
            analysis::mds(&input.load(dd)?, &params, common.seed)?,
        )?,
        Command::Ar1 { input, out, params } => {
            emit(&out, analysis::ar1(&input.load(dd)?, &params)?)?
        }
        Command::Smooth { input, out, params } => {
            emit(&out, analysis::smooth(&input.load(dd)?, &params)?)?
        }
        Command::Slutsky { out, seed, params } => emit(&out, analysis::slutsky(&params, seed)?)?,
        Command::Power { out, seed, params } => emit(&out, analysis::power(&params, seed, dd)?)?,
        Command::Report { config, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("cannot read {}", config.display()))?;
            let cfg = report::ReportConfig::from_toml(&text)
                .with_context(|| format!("parsing {}", config.display()))?;
            let base = config.parent().unwrap_or(Path::new("."));
            let outcome = report::run_report(&cfg, base, dd, out.as_deref())?;
            eprintln!(
                "manifest written to {}",
                outcome.output_dir.join("manifest.json").display()
            );
            if outcome.failures > 0 {
                eprintln!("{} analysis run(s) failed", outcome.failures);
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
