//! Command-line front end for `rigid-pinn-core`: JSON run configuration,
//! CSV and checkpoint file formats, and the `simulate`, `train`, `estimate`,
//! `sweep`, `slice` and `verify` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod verify;

pub use commands::{Inputs, Method};
pub use config::RunConfig;
pub use error::CliError;
