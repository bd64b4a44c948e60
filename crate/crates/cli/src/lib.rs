//! Command-line front end of the `itemwatch` engine.
//!
//! * `simulate` runs a study configuration and writes trajectory and
//!   quantile tables.
//! * `monitor` applies one administration's batch to a persisted monitor
//!   state and writes the detection table.
//! * `validate` runs the built-in oracle and calibration suites.

pub mod batch;
pub mod config;
mod error;
pub mod monitor;
pub mod output;
pub mod simulate;
pub mod snapshot;
pub mod validate;

pub use error::{CliError, Result};
