//! Command-line front end for `qbattery`: scenario configs, CSV datasets for
//! the three figures, closed-form series and the acceptance suite.

pub mod analytic_cmd;
pub mod config;
pub mod csv;
pub mod error;
pub mod figures;
pub mod manifest;
pub mod run;
pub mod verify;

pub use config::{Override, ScenarioConfig};
pub use error::{CliError, CliResult};
