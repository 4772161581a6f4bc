//! Configuration loading and command implementations behind the
//! `aerial-d2d` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod eval;

pub use error::CliError;
