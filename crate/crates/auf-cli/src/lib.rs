//! IO companion to `auf-core`: file formats, the estimator artifact, and the
//! implementations behind the `auf` command-line tool.
//!
//! Formats are plain UTF-8 text, deterministic, and written atomically
//! (temp file + rename), so identical invocations produce byte-identical
//! outputs. Floats serialize with the shortest representation that parses
//! back to the same bits.

pub mod artifact;
pub mod commands;
pub mod formats;

use std::fmt;
use std::path::Path;

/// Failures surfaced to the command line, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad inputs: unknown flags or ids, malformed files, schema and
    /// dimension mismatches, unreadable or unwritable paths. Exit code 2.
    #[error("{0}")]
    Validation(String),
    /// Numerical machinery failed (ill-conditioned solve, quadrature).
    /// Exit code 3.
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn validation(msg: impl fmt::Display) -> Self {
        CliError::Validation(msg.to_string())
    }
}

impl From<auf_core::Error> for CliError {
    fn from(e: auf_core::Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Read a whole file, attributing errors to the path.
pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

/// Write a file atomically: write to a temp sibling, then rename over the
/// destination.
pub fn write_atomic(path: &Path, content: &str) -> CliResult<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    std::fs::write(&tmp, content)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::Validation(format!("cannot finalize {}: {e}", path.display())))
}
