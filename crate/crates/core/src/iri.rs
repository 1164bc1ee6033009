use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An entity identifier: an absolute IRI or a bare/CURIE-shaped id.
///
/// Stored in expanded form whenever a prefix was known at construction time,
/// so equality is always on the expanded string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

const FORBIDDEN: &[char] = &['(', ')', '<', '>', '"'];

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self> {
        let value = value.into();
        if value.is_empty() {
            return Err(Error::InvalidIri(value, "empty"));
        }
        if value.chars().any(char::is_whitespace) {
            return Err(Error::InvalidIri(value, "contains whitespace"));
        }
        if value.contains(FORBIDDEN) {
            return Err(Error::InvalidIri(value, "contains a reserved character"));
        }
        if let Some((prefix, _)) = value.split_once(':') {
            if prefix.is_empty() && value.len() == 1 {
                return Err(Error::InvalidIri(value, "empty CURIE"));
            }
        }
        Ok(Iri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Iri {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Iri::new(value)
    }
}

impl TryFrom<&str> for Iri {
    type Error = Error;

    fn try_from(value: &str) -> Result<Self> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> String {
        iri.0
    }
}

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const OBO: &str = "http://purl.obolibrary.org/obo/";
pub const OBO_IN_OWL: &str = "http://www.geneontology.org/formats/oboInOwl#";
pub const DC: &str = "http://purl.org/dc/elements/1.1/";

pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const RDFS_COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";
pub const OWL_THING: &str = "http://www.w3.org/2002/07/owl#Thing";

/// Prefix name (without the colon) to namespace IRI.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixMap {
    map: BTreeMap<String, String>,
}

impl PrefixMap {
    pub fn empty() -> Self {
        PrefixMap::default()
    }

    /// The four prefixes every functional-syntax document may use undeclared.
    pub fn standard() -> Self {
        let mut map = PrefixMap::default();
        map.insert("rdf", RDF);
        map.insert("rdfs", RDFS);
        map.insert("xsd", XSD);
        map.insert("owl", OWL);
        map
    }

    /// [`PrefixMap::standard`] plus the OBO namespaces used by GO-style files.
    pub fn common() -> Self {
        let mut map = PrefixMap::standard();
        map.insert("obo", OBO);
        map.insert("oboInOwl", OBO_IN_OWL);
        map.insert("dc", DC);
        map
    }

    pub fn insert(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.map.insert(prefix.into(), namespace.into());
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.map.get(prefix).map(String::as_str)
    }

    pub fn extend(&mut self, other: &PrefixMap) {
        for (k, v) in &other.map {
            self.map.insert(k.clone(), v.clone());
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Expands `<iri>` and declared CURIEs; returns `None` for a CURIE whose
    /// prefix is not declared.
    pub fn expand_strict(&self, raw: &str) -> Option<String> {
        if let Some(inner) = raw.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
            return Some(inner.to_string());
        }
        let (prefix, local) = raw.split_once(':')?;
        self.get(prefix).map(|ns| format!("{ns}{local}"))
    }

    /// Like [`PrefixMap::expand_strict`] but leaves unknown forms untouched.
    pub fn expand(&self, raw: &str) -> String {
        self.expand_strict(raw).unwrap_or_else(|| raw.to_string())
    }

    pub fn expand_iri(&self, raw: &str) -> Result<Iri> {
        Iri::new(self.expand(raw))
    }

    /// Shortest `prefix:local` rendering, or `<iri>` when no namespace matches.
    pub fn compact(&self, iri: &Iri) -> String {
        let s = iri.as_str();
        let best = self
            .map
            .iter()
            .filter(|(_, ns)| !ns.is_empty() && s.starts_with(ns.as_str()))
            .max_by_key(|(_, ns)| ns.len());
        match best {
            Some((prefix, ns)) if is_safe_local(&s[ns.len()..]) => {
                format!("{prefix}:{}", &s[ns.len()..])
            }
            _ => format!("<{s}>"),
        }
    }
}

fn is_safe_local(local: &str) -> bool {
    local
        .chars()
        .all(|c| c.is_alphanumeric() || "_-.:/%~".contains(c))
}
