//! File formats, certification commands and property suites for dynamical
//! frames, on top of `dynframe-core`.

pub mod cli;
mod error;
pub mod json;
pub mod random;
pub mod suites;

pub use error::{CliError, CliResult};
