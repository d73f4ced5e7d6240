//! Bayesian change-point and variance-decomposition models.

mod anova;
mod bcp;
mod diagnostics;
mod special;

pub use anova::{
    hierarchical_anova, hierarchical_anova_chains, hierarchical_anova_values, AnovaConfig,
    AnovaPosterior,
};
pub use bcp::{barry_hartigan, barry_hartigan_values, BcpConfig, BcpResult};
pub use diagnostics::{gelman_rubin, icc_summary, AnovaSummary, Interval};
