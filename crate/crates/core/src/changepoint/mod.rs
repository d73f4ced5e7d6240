//! Classical change-point detection for shifts in the mean.
//!
//! Break positions are reported as the index (and year) of the last
//! observation of each segment except the final one.

mod bai_perron;
mod cbs;

pub use bai_perron::{bai_perron, bai_perron_values, BaiPerronConfig, BreakModel};
pub use cbs::{cbs, cbs_values, max_arc_statistic, CbsConfig, CbsResult};
