//! Batch runner for dilute cooling experiments.
//!
//! A TOML configuration (see `SCHEMA.md` at the repository root) selects the model and the task
//! settings; every task writes CSV and JSON artifacts stamped with the
//! configuration hash, the master seed and the tool version.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod plot;
pub mod regime;
pub mod tasks;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
