//! Seeded verification runs behind the `stl` command line tool.
//!
//! Every run is a pure function of its [`ExperimentConfig`]: trial `i` draws
//! from the seed `derive_seed(config.seed, i)`, trials may be evaluated in any
//! order, and the JSON report body carries no timestamps, so reruns are
//! byte-identical.

mod commands;
mod config;
mod report;

pub use commands::{
    continuity, det_compare, factor_check, run, trace_check, weyl_scan, z_grid, RunOutput, WEYL_LADDER,
    Z_GRID_ANGLES, Z_GRID_RADII,
};
pub use config::{Command, ExperimentConfig, ADMISSIBILITY_TOL};
pub use report::{input_hash, Metrics, Report, Summary, TrialRecord};
