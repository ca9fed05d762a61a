//! Reading texts and patterns from disk or the command line.

use std::fs;
use std::io;
use std::path::Path;

use mismatch_index::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum TextFormat {
    /// One symbol per byte; a single trailing newline is dropped.
    #[default]
    Bytes,
    /// Whitespace-separated unsigned integers.
    Ints,
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("token {index} ({token:?}) is not an unsigned 32-bit integer")]
    BadInt { index: usize, token: String },
}

pub fn parse(data: &[u8], format: TextFormat) -> Result<Vec<Symbol>, IngestError> {
    match format {
        TextFormat::Bytes => {
            let data = data.strip_suffix(b"\n").unwrap_or(data);
            let data = data.strip_suffix(b"\r").unwrap_or(data);
            Ok(data.iter().map(|&b| Symbol::from(b)).collect())
        }
        TextFormat::Ints => String::from_utf8_lossy(data)
            .split_whitespace()
            .enumerate()
            .map(|(index, t)| t.parse().map_err(|_| IngestError::BadInt { index, token: t.to_string() }))
            .collect(),
    }
}

pub fn read(path: &Path, format: TextFormat) -> Result<Vec<Symbol>, IngestError> {
    let data = fs::read(path).map_err(|source| IngestError::Io { path: path.display().to_string(), source })?;
    parse(&data, format)
}
