//! Experiment runner for `ris-core`: configuration, commands and output
//! formats behind the `ris-sim` binary.

// Parameter checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use error::{CliError, Result};
