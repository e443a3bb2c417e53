//! Library half of the `warpfake` command-line tool: run configuration,
//! manifests, file I/O and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod io;
pub mod manifest;

pub use config::RunConfig;
pub use manifest::ManifestEntry;
