//! Seeded Monte Carlo studies: detection power of the change-point methods
//! and empirical size of the dependence tests.

mod power;
pub mod rng;
mod scenario;

pub use power::{
    published_scenarios, run_ar1_power, run_power, run_size, simulate, DetectionRule, Detector,
    PowerResult, PowerScenario,
};
pub use scenario::{parse_scenarios, results_csv};
