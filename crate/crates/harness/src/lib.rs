//! Configuration, experiment drivers and command-line front end for the
//! `pbdw` crate.
//!
//! Each study reads one [`config::ExperimentConfig`], runs its cells on the
//! rayon pool and writes CSV tables whose first line records the
//! configuration hash. Re-running with the same configuration reproduces
//! the tables byte for byte.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod report;
pub mod setup;
pub mod stats;
pub mod studies;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
