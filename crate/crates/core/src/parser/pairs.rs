use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{for_each_line, Diagnostics, Parsed, INLINE_SOURCE};
use crate::error::Result;
use crate::iri::{Iri, PrefixMap};

/// One row of a pair file. `label` is `None` for 2-column rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub a: Iri,
    pub b: Iri,
    pub label: Option<bool>,
}

pub fn parse_pairs(text: &str, prefixes: &PrefixMap) -> Result<Parsed<Vec<PairRecord>>> {
    parse_pairs_reader(text.as_bytes(), Path::new(INLINE_SOURCE), prefixes)
}

/// Two or three tab-separated columns; the optional third is `0` or `1`.
/// Blank lines and `#` comments are ignored. File order is preserved.
pub fn parse_pairs_reader<R: BufRead>(
    reader: R,
    file: &Path,
    prefixes: &PrefixMap,
) -> Result<Parsed<Vec<PairRecord>>> {
    let mut diags = Diagnostics::new(file);
    let mut out = Vec::new();
    for_each_line(reader, |lineno, line| {
        let line = match line {
            Ok(l) => l,
            Err(()) => {
                diags.error(lineno, "line is not valid UTF-8");
                return;
            }
        };
        if line.trim().is_empty() || line.starts_with('#') {
            return;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if !(2..=3).contains(&cols.len()) || cols.iter().any(|c| c.is_empty()) {
            diags.error(lineno, format!("expected 2 or 3 tab-separated columns, found {}", cols.len()));
            return;
        }
        let label = match cols.get(2) {
            None => None,
            Some(&"1") => Some(true),
            Some(&"0") => Some(false),
            Some(other) => {
                diags.error(lineno, format!("label must be 0 or 1, found {other:?}"));
                return;
            }
        };
        match (prefixes.expand_iri(cols[0]), prefixes.expand_iri(cols[1])) {
            (Ok(a), Ok(b)) => out.push(PairRecord { a, b, label }),
            (Err(e), _) | (_, Err(e)) => diags.error(lineno, e.to_string()),
        }
    })?;
    diags.finish(out)
}
