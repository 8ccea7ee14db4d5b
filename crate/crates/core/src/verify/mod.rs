//! Configuration-driven verification sweeps and their reports.

pub mod config;
pub mod properties;
pub mod report;
pub mod runner;

pub use config::{CheckKind, ExperimentConfig, Tolerances, DEFAULT_SEED};
pub use report::{ReportRow, Summary, REPORT_HEADER};
pub use runner::{evaluate, plan, run, RunOutcome, Task};
