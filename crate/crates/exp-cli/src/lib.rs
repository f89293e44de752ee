//! Experiment runner: TOML configurations in, CSV result tables out.

pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod sweep;
pub mod table;
pub mod validate;

pub use config::{ExperimentConfig, Kind};
pub use error::{CliError, Result};
pub use run::{run, Outcome};
pub use table::ResultTable;
