//! Experiment orchestration for the `resgrad` binary: configuration parsing
//! (flags over an optional `key = value` config file) and the four commands
//! (`simulate`, `order`, `compare`, `exact`), all emitting deterministic CSV.

pub mod config;
pub mod runner;

pub use config::{parse_config, render, CommandKind, RawConfig, RunConfig};
pub use runner::run;
