//! File parsing, CSV output and the benchmark runner behind the `cmvroots`
//! binary.

pub mod bench;
pub mod coeffs;
pub mod output;

pub use bench::{bench, parse_sizes, CliError, Oracle, Params, TestSet};
pub use coeffs::{format_coefficients, parse_coefficients};
