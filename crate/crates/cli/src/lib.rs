//! Library half of the `cohomkit` binary: argument definitions, suite
//! batteries and report rendering.

pub mod commands;
pub mod report;
pub mod suites;

pub use commands::{configure_threads, execute, Cli};
pub use report::Report;
