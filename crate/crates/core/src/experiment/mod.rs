//! Configured experiments: α-sweeps and window-growth studies.

pub mod config;
pub mod sweep;

pub use config::{parse_config, ExperimentConfig};
pub use sweep::{fit_slope, run_sweep, run_window_study, FittedSlope, SweepResult, SweepRow, WindowStudy};
