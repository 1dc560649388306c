//! Command layer over the uniband library: scenario files in, CSV/SVG and
//! verification verdicts out. Everything here is also callable from tests;
//! the binary in `main.rs` only parses arguments and maps errors to exit
//! codes.

pub mod commands;
pub mod csvout;
pub mod scenario;
pub mod svg;

use std::fmt;

/// Failures grouped by exit code: validation problems exit 1, runtime
/// failures exit 2, violated inequalities exit 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Validation(String),
    Runtime(String),
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Violation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) | CliError::Violation(m) => {
                f.write_str(m)
            }
        }
    }
}

impl std::error::Error for CliError {}
