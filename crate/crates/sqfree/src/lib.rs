//! Command-line driver, file formats and parallel scans on top of `sqfree-core`.

/// Tag written into every JSON document and error line.
pub const SCHEMA: &str = "sqfree/1";

pub mod cli;
pub mod error;
pub mod output;
pub mod parallel;
