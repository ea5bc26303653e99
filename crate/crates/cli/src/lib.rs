//! Command-line front end for `focklab`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod parse;

pub use commands::{run, Cli};
pub use config::RunConfig;
pub use error::{CliError, ExitKind};
