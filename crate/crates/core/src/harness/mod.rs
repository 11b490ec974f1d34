//! Experiment sweeps, report tables, and reference values.

mod config;
mod experiment;
pub mod reference;
mod report;
mod selftest;

pub use config::{parse_config, RunSettings};
pub use experiment::{
    default_outer, run_cell, run_experiment, CellRecord, ExperimentConfig, ExperimentReport, Resolution,
};
pub use report::{cell_text, comparison, emit_table, write_table, Format, CSV_HEADER};
pub use selftest::{run_selftest, Check};
