//! File formats, a worker pool and the command-line driver on top of
//! `gzscar-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod parse;
pub mod pool;

pub use commands::{run, Outcome};
pub use config::{Cli, RunConfig};
pub use error::CliError;
