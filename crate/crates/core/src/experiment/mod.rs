//! Sweeps over the initial polar angle, their CSV/SVG output and the
//! preset figure families.

pub mod config;
pub mod figures;
pub mod output;
pub mod sweep;

pub use config::{ExperimentConfig, OutputSpec, SweepSpec};
pub use sweep::{run_sweep, Execution, SweepRecord, SweepResult};
