//! Library half of the `snaprg` command-line tool: configuration, the staged
//! pipeline with its checksum manifest, and the individual subcommands.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod pipeline;
pub mod tables;

pub use config::{ConfigError, RunConfig, ValidatedConfig};
pub use manifest::Manifest;
pub use pipeline::{run_pipeline, PipelineOptions, PipelineReport};
