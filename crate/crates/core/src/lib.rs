//! Exposure-regularized ensembles of online portfolio strategies.
//!
//! The crate is `no_std` (with `alloc`). File formats and the command line live in the
//! companion `erep-cli` crate.

#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod erep;
pub mod error;
pub mod evaluation;
pub mod linalg;
pub mod market;
pub mod optimizer;
pub mod portfolio;
pub mod strategies;

pub use error::{Error, Result};
pub use market::{Group, Grouping, MarketSeries};
pub use portfolio::Portfolio;
pub use strategies::{StrategySpec, StrategyState};
