//! Std companion to `iis-core`: files on disk, configuration, the HTTP
//! service and the `iis` command line.

pub mod bench;
pub mod cli;
pub mod config;
pub mod error;
pub mod evaluate;
pub mod fsio;
pub mod json;
pub mod service;

pub use error::{Error, Result};
