//! Pipeline commands behind the `ids` binary: preprocess, tune, train,
//! evaluate and report, driven by a single TOML run configuration.

pub mod config;
pub mod error;
pub mod manifest;
pub mod pipeline;
pub mod plot;
pub mod store;

pub use config::{Overrides, RunConfig};
pub use error::{CliError, Result};
