//! File formats, configuration and pipeline orchestration around
//! [`kgaudit_core`], plus the `kgaudit` command-line tool.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod io;
pub mod pipeline;

pub use error::{Error, Result};
pub use kgaudit_core as core;
