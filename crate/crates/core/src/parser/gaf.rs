//! GAF-like association files: tab separated, `!` comments. Column 2 is the
//! entity id, column 4 the qualifier, column 5 the class and column 7 the
//! evidence code (1-based, as in GAF 2.x).

use std::io::BufRead;
use std::path::Path;

use super::{for_each_line, Diagnostics, Parsed, INLINE_SOURCE};
use crate::error::Result;
use crate::iri::{Iri, PrefixMap};
use crate::kb::{is_valid_evidence_code, Association};

const ENTITY: usize = 1;
const QUALIFIER: usize = 3;
const CLASS: usize = 4;
const EVIDENCE: usize = 6;

pub fn parse_gaf(text: &str, relation: &Iri, prefixes: &PrefixMap) -> Result<Parsed<Vec<Association>>> {
    parse_gaf_reader(text.as_bytes(), Path::new(INLINE_SOURCE), relation, prefixes)
}

pub fn parse_gaf_reader<R: BufRead>(
    reader: R,
    file: &Path,
    relation: &Iri,
    prefixes: &PrefixMap,
) -> Result<Parsed<Vec<Association>>> {
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
        if line.starts_with('!') || line.trim().is_empty() {
            return;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        let entity = cols.get(ENTITY).copied().unwrap_or("");
        let class = cols.get(CLASS).copied().unwrap_or("");
        if entity.is_empty() || class.is_empty() {
            diags.warn(lineno, "row lacks an entity id (column 2) or class (column 5); skipped");
            return;
        }
        let qualifier = cols.get(QUALIFIER).copied().unwrap_or("");
        if qualifier.split('|').any(|q| q.eq_ignore_ascii_case("NOT")) {
            diags.warn(lineno, "negated (NOT) annotation skipped");
            return;
        }
        let evidence = match cols.get(EVIDENCE).copied().unwrap_or("") {
            "" => None,
            code if is_valid_evidence_code(code) => Some(code.to_string()),
            code => {
                diags.warn(lineno, format!("malformed evidence code {code:?}; row skipped"));
                return;
            }
        };
        let (entity, class) = match (Iri::new(prefixes.expand(entity)), prefixes.expand_iri(class)) {
            (Ok(e), Ok(c)) => (e, c),
            (Err(e), _) | (_, Err(e)) => {
                diags.warn(lineno, format!("{e}; row skipped"));
                return;
            }
        };
        out.push(Association::new(entity, relation.clone(), class, evidence));
    })?;
    diags.finish(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn rel() -> Iri {
        Iri::new("http://x.org/has_function").unwrap()
    }

    fn prefixes() -> PrefixMap {
        let mut p = PrefixMap::standard();
        p.insert("GO", "http://purl.obolibrary.org/obo/GO_");
        p
    }

    #[test]
    fn evidence_is_preserved() {
        let text = "!gaf-version: 2.1\nUniProtKB\tP0AAF6\tartJ\t\tGO:0007610\tPMID:1\tIEA\t\tF\n";
        let parsed = parse_gaf(text, &rel(), &prefixes()).unwrap();
        assert_eq!(parsed.value.len(), 1);
        let a = &parsed.value[0];
        assert_eq!(a.entity.as_str(), "P0AAF6");
        assert_eq!(a.class.as_str(), "http://purl.obolibrary.org/obo/GO_0007610");
        assert_eq!(a.evidence.as_deref(), Some("IEA"));
        assert_eq!(a.relation, rel());
    }

    #[test]
    fn comments_and_empty_files() {
        assert!(parse_gaf("!gaf-version: 2.1\n", &rel(), &prefixes())
            .unwrap()
            .value
            .is_empty());
        assert!(parse_gaf("", &rel(), &prefixes()).unwrap().value.is_empty());
    }

    #[test]
    fn short_rows_warn() {
        let parsed = parse_gaf("UniProtKB\tP1\n", &rel(), &prefixes()).unwrap();
        assert!(parsed.value.is_empty());
        assert_eq!(parsed.warnings[0].line, 1);
    }

    #[test]
    fn missing_evidence_column_is_none() {
        let parsed = parse_gaf("DB\tP1\tx\t\tGO:1\n", &rel(), &prefixes()).unwrap();
        assert_eq!(parsed.value[0].evidence, None);
    }

    #[test]
    fn negated_rows_are_skipped() {
        let parsed = parse_gaf("DB\tP1\tx\tNOT|enables\tGO:1\tref\tEXP\n", &rel(), &prefixes()).unwrap();
        assert!(parsed.value.is_empty());
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn non_utf8_is_an_error() {
        let bytes: &[u8] = b"DB\tP1\tx\t\tGO:1\tref\tEXP\n\xff\n";
        let err = parse_gaf_reader(bytes, Path::new("a.gaf"), &rel(), &prefixes()).unwrap_err();
        let Error::Parse(d) = err else { panic!() };
        assert_eq!(d[0].line, 2);
    }
}
