//! Plain-text file formats: treebanks, bitexts, model tables and n-best
//! lists.

mod bitext;
mod corpus;
mod model_file;
mod nbest;

pub use bitext::{parse_bitext, write_bitext};
pub use corpus::{parse_corpus, write_record, write_corpus};
pub use model_file::{format_probability, parse_model, write_model, ModelFile};
pub use nbest::{parse_nbest, write_nbest};

use thiserror::Error;

/// A malformed input file, located by file name and 1-based line.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{file}:{line}: {message}")]
pub struct FormatError {
    pub file: String,
    pub line: usize,
    pub message: String,
    /// The underlying model error, when there is one.
    pub cause: Option<reltrans_core::Error>,
}

impl FormatError {
    pub fn new(file: &str, line: usize, message: impl Into<String>) -> Self {
        FormatError {
            file: file.to_string(),
            line,
            message: message.into(),
            cause: None,
        }
    }

    pub fn from_core(file: &str, line: usize, err: reltrans_core::Error) -> Self {
        FormatError {
            file: file.to_string(),
            line,
            message: err.to_string(),
            cause: Some(err),
        }
    }
}

/// Non-blank lines with their 1-based numbers, grouped into blocks
/// separated by blank lines.
fn blocks(text: &str) -> Vec<Vec<(usize, &str)>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push((i + 1, line));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}
