//! Batch front end for the nlwave laboratory: plain-text configuration,
//! command dispatch, deterministic file outputs.

pub mod commands;
pub mod config;

pub use commands::{execute, RunError};
pub use config::{parse_config, Command, RunConfig};
