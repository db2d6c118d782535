//! Experiment runner: derivative errors of GFS and the baseline methods on
//! the test-function catalog, as CSV tables and convergence slopes.
//!
//! Rows are independent and run on the rayon pool when the `parallel`
//! feature is on (the default); [`Execution::Sequential`] forces one thread.

pub mod config;
pub mod csv;
pub mod leakage;
pub mod run;
pub mod sweep;

pub use config::{ConfigError, ExperimentConfig, JumpSpec, Method, PronyM};
pub use csv::{emit_csv, format_float, write_csv, EmitError, CSV_HEADER};
pub use leakage::{leakage_demo, leakage_demo_for, LeakageReport};
pub use run::{run_experiment, run_experiment_with, run_row, Execution, ExperimentReport, ReportRow};
pub use sweep::{convergence_sweep, convergence_sweep_with, decreasing_segment, loglog_slope, SweepResult};
