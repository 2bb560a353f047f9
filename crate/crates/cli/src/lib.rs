//! Experiment driver: instance generation, algorithm runs, criticality
//! reports, grid experiments and the invariant suite.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;

pub use error::{CliError, Result};
