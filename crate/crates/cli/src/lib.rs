//! Config-driven front end for the fractional Dunkl transform library.

pub mod config;
pub mod jobs;
pub mod output;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
