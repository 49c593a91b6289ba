//! Library side of the command-line tool: report assembly, input loading
//! with schema checks, built-in manifold generation, and the self-test
//! driver shared between the `selftest` subcommand and the acceptance
//! suite.

pub mod inputs;
pub mod report;
pub mod selftest;

pub use report::{float_str, Report};
