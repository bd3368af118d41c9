//! File formats, experiment configuration and the `backtest` / `compare` / `diagnose`
//! commands built on `erep-core`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

pub use commands::{cmd_backtest, cmd_compare, cmd_diagnose, Workspace};
pub use config::{Overrides, RunConfig};
pub use error::{CliError, Result};
