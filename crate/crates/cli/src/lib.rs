//! Front ends for `fundsim-core`: run configuration handling for the
//! `fundsim` binary and the HTTP service it can launch.

pub mod config;
mod error;
pub mod service;

pub use error::CliError;
