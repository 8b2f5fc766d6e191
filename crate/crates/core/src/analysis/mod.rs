//! Experiments, fits, reports and the command-line front end.

mod cli;
mod config;
mod experiments;
mod fit;
mod fourier;
mod report;

pub use cli::run_cli;
pub use config::{DatumConfig, ExperimentConfig, GridConfig};
pub use experiments::*;
pub use fit::{
    bound_check, fit_exponential_rate, fit_power_law, linear_grid, log_grid, BoundCheck,
    DecaySeries, ExpFit, FitResult,
};
pub use fourier::{DataPair, ShellPlan};
pub use report::{Check, Comparison, NamedBound, NamedFit, NamedRate, NamedValue, Report, Row};
