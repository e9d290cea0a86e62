//! Library side of the `nb` binary: argument types, the per-d sweep driver,
//! command implementations and the plot writer. Kept as a library so the
//! integration and acceptance suites can drive the same code paths that the
//! binary uses.

pub mod commands;
pub mod driver;
pub mod svg;

use std::fmt;

/// Errors split by exit code: usage/parameter problems exit 2, numerical
/// failures exit 1.
#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Numerical(String),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(m) => write!(f, "usage error: {m}"),
            AppError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for AppError {}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Numerical(_) => 1,
        }
    }
}

/// Anything that goes wrong while computing is a numerical failure.
pub fn numerical(e: impl fmt::Display) -> AppError {
    AppError::Numerical(e.to_string())
}

pub fn usage(msg: impl Into<String>) -> AppError {
    AppError::Usage(msg.into())
}
