//! Command-line driver and head-to-head harness for `lotus-core`.
//!
//! - [`run`]: one solver run and its artifacts.
//! - [`ratio`], [`timing`], [`stats`]: comparison metrics.
//! - [`report`]: pairing of runs into a [`report::ComparisonReport`].
//! - [`experiment`]: batch runs from a TOML config.
//! - [`cli`]: the `lotus` binary's subcommands.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod ratio;
pub mod report;
pub mod run;
pub mod stats;
pub mod timing;

pub use error::{BenchError, EXIT_INVALID_CONFIG, EXIT_SOLVER_FAILURE};
