//! Command-line pipeline over the `polarscope` library.

pub mod cache;
pub mod cli;
pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod output;

pub use cli::{run, Cli, Command};
pub use error::{CliError, Result};
