//! Reading and writing instances, solutions and run reports.

pub mod benchmark;
pub mod generator;
pub mod native;
pub mod report;
pub mod solution;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::ModelError;

pub use benchmark::{parse_benchmark, parse_benchmark_solution, BenchmarkSolution};
pub use generator::{generate, GeneratorConfig};
pub use native::{parse_instance, write_instance};
pub use report::{ReportRow, REPORT_HEADER};
pub use solution::{parse_solution, write_solution};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub(crate) fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Parse { line, msg: msg.into() })
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File { path: path.to_owned(), source })
}

pub fn write_file(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::File { path: path.to_owned(), source })
}

/// Non-empty, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, IoError> {
    tok.parse().map_err(|_| IoError::Parse { line, msg: format!("invalid {what} '{tok}'") })
}
