//! Experiment driver for `aalab-core`: scenario configs, string registries,
//! CSV and manifest formats, and the shared diagnostics behind the `aalab`
//! command line.

pub mod config;
pub mod experiments;
pub mod io;
pub mod registry;

pub use config::ScenarioConfig;
