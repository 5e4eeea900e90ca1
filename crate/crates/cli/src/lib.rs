//! Library surface behind the `hoi-forge` binary: configuration, clip
//! manifests and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;

pub use config::PipelineConfig;
pub use error::{CliError, CliResult};
pub use manifest::{ClipManifest, ClipRecord};
