//! Line-oriented JSON corpus IO.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum JsonlError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Clone for JsonlError {
    fn clone(&self) -> Self {
        match self {
            JsonlError::Io(e) => JsonlError::Io(std::io::Error::new(e.kind(), e.to_string())),
            JsonlError::Parse { line, message } => JsonlError::Parse {
                line: *line,
                message: message.clone(),
            },
        }
    }
}

impl PartialEq for JsonlError {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (JsonlError::Io(a), JsonlError::Io(b)) => a.kind() == b.kind(),
            (
                JsonlError::Parse { line: a, message: m },
                JsonlError::Parse {
                    line: b,
                    message: n,
                },
            ) => a == b && m == n,
            _ => false,
        }
    }
}

/// Iterate records with their 1-based line numbers. Blank lines are skipped.
pub fn records<T: DeserializeOwned, R: BufRead>(
    reader: R,
) -> impl Iterator<Item = Result<(usize, T), JsonlError>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(index, line)| match line {
            Err(e) => Some(Err(JsonlError::Io(e))),
            Ok(line) if line.trim().is_empty() => None,
            Ok(line) => Some(
                serde_json::from_str(&line)
                    .map(|record| (index + 1, record))
                    .map_err(|e| JsonlError::Parse {
                        line: index + 1,
                        message: e.to_string(),
                    }),
            ),
        })
}

/// Load a whole JSONL file.
pub fn load_path<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, JsonlError> {
    let reader = BufReader::new(File::open(path)?);
    records(reader)
        .map(|r| r.map(|(_, record)| record))
        .collect()
}

/// Write one record and a newline.
pub fn write_line<T: Serialize, W: Write>(mut writer: W, record: &T) -> std::io::Result<()> {
    serde_json::to_writer(&mut writer, record)?;
    writer.write_all(b"\n")
}
