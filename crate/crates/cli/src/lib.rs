//! Experiment runner: builds domains from a JSON config, solves the transport
//! problem, runs one named experiment and writes CSV tables, SVG figures and a
//! JSON report.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod output;
pub mod report;
pub mod run;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
pub use report::{Report, Status};
pub use run::{run, solve, SolveCache};
