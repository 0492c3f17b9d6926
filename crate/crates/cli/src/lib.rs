//! File formats and commands behind the `vanvleck` binary.

pub mod commands;
pub mod error;
pub mod files;
pub mod transform;

pub use error::{exit_code, CliError, Result};
pub use files::{parse_operator, OperatorFile, PairsFile, ParsedOperator};
