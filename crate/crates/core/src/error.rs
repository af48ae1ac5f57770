//! Error type shared by all engines.

use std::io;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed request: mismatched gradings, unknown names, bad flags.
    #[error("usage error: {0}")]
    Usage(String),
    /// A query reached outside the computed range.
    #[error("range error: {0}")]
    Range(String),
    /// The estimated size exceeds the configured cap.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// A secondary operation whose preconditions fail, e.g. an undefined Massey product.
    #[error("undefined: {0}")]
    Undefined(String),
    /// Something that should be impossible happened.
    #[error("internal consistency error: {0}")]
    Consistency(String),
    /// A missing prerequisite such as an absent multiplication table.
    #[error("missing dependency: {0}")]
    Dependency(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
