//! Command-line companion to `greenride-core`: loads and writes the CSV
//! and JSON formats, resolves configuration, and drives simulations,
//! sweeps, and oracle checks from the `greenride` binary.
//!
//! The library side exists so integration tests can call loaders and
//! writers directly; all user interaction goes through [`cli`] and
//! [`commands`].

pub mod cli;
pub mod commands;
pub mod error;
pub mod ingest;
pub mod manifest;
pub mod output;
pub mod settings;

pub use error::{CliError, Result};
