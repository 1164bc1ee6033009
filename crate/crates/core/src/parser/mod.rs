//! Readers for the pipeline's input files.
//!
//! * ontology: OWL functional-style syntax subset ([`parse_ontology`])
//! * associations: GAF-like TSV ([`parse_gaf`])
//! * evaluation pairs: 2–3 column TSV ([`parse_pairs`])
//! * pre-training text: one document per line ([`read_text_corpus`])
//!
//! All readers work line by line on a [`BufRead`](std::io::BufRead) and
//! report problems as [`ParseDiagnostic`]s. Any `Error` diagnostic rejects
//! the whole document.

use std::fmt;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod gaf;
mod lexer;
mod owl;
mod pairs;
mod text;
mod writer;

pub use gaf::{parse_gaf, parse_gaf_reader};
pub use owl::{parse_ontology, parse_ontology_bytes, parse_ontology_reader, parse_ontology_with_prefixes};
pub use pairs::{parse_pairs, parse_pairs_reader, PairRecord};
pub use text::{read_text_corpus, read_text_corpus_reader};
pub use writer::{axiom_to_functional, to_functional_syntax};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub file: PathBuf,
    /// 1-based.
    pub line: usize,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{}:{}: {sev}: {}",
            self.file.display(),
            self.line,
            self.message
        )
    }
}

/// A successfully parsed value together with its warnings.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<ParseDiagnostic>,
}

pub(crate) const INLINE_SOURCE: &str = "<input>";

/// Collects diagnostics for one file.
#[derive(Debug)]
pub(crate) struct Diagnostics {
    file: PathBuf,
    items: Vec<ParseDiagnostic>,
    has_error: bool,
}

impl Diagnostics {
    pub(crate) fn new(file: &Path) -> Self {
        Diagnostics {
            file: file.to_path_buf(),
            items: Vec::new(),
            has_error: false,
        }
    }

    pub(crate) fn error(&mut self, line: usize, message: impl Into<String>) {
        self.has_error = true;
        self.push(line, Severity::Error, message.into());
    }

    pub(crate) fn warn(&mut self, line: usize, message: impl Into<String>) {
        self.push(line, Severity::Warning, message.into());
    }

    fn push(&mut self, line: usize, severity: Severity, message: String) {
        self.items.push(ParseDiagnostic {
            file: self.file.clone(),
            line,
            severity,
            message,
        });
    }

    pub(crate) fn finish<T>(self, value: T) -> Result<Parsed<T>> {
        if self.has_error {
            Err(Error::Parse(self.items))
        } else {
            Ok(Parsed {
                value,
                warnings: self.items,
            })
        }
    }
}

/// Yields `(line_number, Result<line>)`; non-UTF-8 lines are reported as
/// `Err(())` so the caller can attach a diagnostic. Trailing `\r\n` is
/// stripped.
pub(crate) fn for_each_line<R: BufRead>(
    mut reader: R,
    mut f: impl FnMut(usize, std::result::Result<&str, ()>),
) -> std::io::Result<usize> {
    let mut buf = Vec::new();
    let mut lineno = 0;
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf)?;
        if n == 0 {
            return Ok(lineno);
        }
        lineno += 1;
        if buf.last() == Some(&b'\n') {
            buf.pop();
            if buf.last() == Some(&b'\r') {
                buf.pop();
            }
        }
        match std::str::from_utf8(&buf) {
            Ok(s) => f(lineno, Ok(s)),
            Err(_) => f(lineno, Err(())),
        }
    }
}
