//! Command-line pipeline and local HTTP service around `golfopt-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod serve;

pub use config::PipelineConfig;
pub use error::CliError;
