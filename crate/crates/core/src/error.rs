use thiserror::Error;

use crate::complex::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The caller asked for something ill-formed (bad flag, mismatched field,
    /// out-of-range index).
    #[error("usage error: {0}")]
    Usage(String),
    /// An arithmetic domain error such as inverting zero.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid filtered chain complex: {}", summarize(.0))]
    Invalid(Vec<Violation>),
    /// A simplicial complex that is not closed under taking faces.
    #[error("closure error: {0}")]
    Closure(String),
    #[error("inconsistent page table: {0}")]
    InconsistentTable(String),
    #[error("page table too short: {0}")]
    InsufficientRMax(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// `true` for errors caused by how the library was called rather than by
    /// the data it was handed.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_))
    }

    pub(crate) fn at_line(self, line: usize) -> Error {
        match self {
            Error::Parse { message, .. } => Error::Parse { line, message },
            Error::Domain(message) | Error::Usage(message) => Error::Parse { line, message },
            other => other,
        }
    }
}

fn summarize(violations: &[Violation]) -> String {
    let shown: Vec<String> = violations.iter().take(3).map(|v| v.to_string()).collect();
    let mut out = shown.join("; ");
    if violations.len() > 3 {
        out.push_str(&format!("; and {} more", violations.len() - 3));
    }
    out
}
