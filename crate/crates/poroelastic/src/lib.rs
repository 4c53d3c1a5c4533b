//! Experiment runner for `poroelastic-core`: TOML run configurations,
//! single runs and refinement studies, CSV tables, diagnostics and gnuplot
//! scripts.

pub mod config;
pub mod error;
pub mod output;
pub mod study;

pub use config::{RunConfig, StudyKind};
pub use error::{CliError, Result};
