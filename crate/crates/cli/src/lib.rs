//! Configuration, orchestration and file output for the `wavegap` command.

pub mod cache;
pub mod config;
pub mod emit;
pub mod error;
pub mod pipeline;
pub mod svg;

pub use config::{parse_config, RunConfig, Task};
pub use error::{CliError, ConfigError};
pub use pipeline::{run_pipeline, RunManifest, RunOptions, TaskRecord, TaskStatus};

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "WAVEGAP_CACHE_DIR";
