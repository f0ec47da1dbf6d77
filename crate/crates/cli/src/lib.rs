//! Front end for `hankel-core`: run configuration, the moment cache, sweeps
//! and the study tables behind the `hankel` binary.

pub mod cache;
pub mod config;
pub mod error;
pub mod kernel;
pub mod output;
pub mod studies;
pub mod sweep;
pub mod verify;

pub use config::{OutFormat, RunConfig};
pub use error::CliError;
