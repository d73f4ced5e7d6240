//! Change-point and temporal-dependence analysis for annual climate series.
//!
//! The crate is organised by analysis family:
//!
//! * [`ingest`] parses monthly and annual records and builds seasonal series.
//! * [`series`] has autocorrelations, least squares and AR(1)-with-trend fits.
//! * [`changepoint`] holds the dynamic-programming break estimator and
//!   circular binary segmentation.
//! * [`bayes`] holds the product-partition change-point sampler, the
//!   hierarchical one-way ANOVA and convergence diagnostics.
//! * [`dependence`] tests the martingale difference hypothesis.
//! * [`smoothing`] provides moving averages, loess and the smoothing demo.
//! * [`sim`] runs seeded Monte Carlo power and size studies.

pub mod bayes;
pub mod changepoint;
pub mod dependence;
mod error;
pub mod ingest;
pub mod series;
pub mod sim;
pub mod smoothing;
pub mod stats;

pub use error::{Error, Result};
pub use ingest::{AnnualSeries, MonthlySeries, Season};
