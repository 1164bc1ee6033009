use std::io;

use thiserror::Error;

use crate::parser::ParseDiagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid IRI {0:?}: {1}")]
    InvalidIri(String, &'static str),

    #[error("unknown class {0}")]
    UnknownClass(String),

    #[error("unknown token {0:?}")]
    UnknownToken(String),

    #[error("vocabulary is empty after applying min_count={0}")]
    EmptyVocabulary(usize),

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("not implemented: {0}")]
    NotImplemented(&'static str),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("entity {0} has no annotations")]
    EmptyAnnotations(String),

    #[error("cannot balance dataset: need {needed} negative pairs, only {available} available")]
    CannotBalance { needed: usize, available: usize },

    #[error("ROC analysis needs at least one positive and one negative label")]
    DegenerateLabels,

    #[error("score is not a finite number: {0}")]
    InvalidScore(f64),

    #[error("runs are not over the same pair set: {0}")]
    PairSetMismatch(String),

    #[error("missing artifact {0}; run the stage that produces it first")]
    MissingArtifact(String),

    #[error("{}", format_diagnostics(.0))]
    Parse(Vec<ParseDiagnostic>),

    #[error(transparent)]
    Io(#[from] io::Error),
}

fn format_diagnostics(diags: &[ParseDiagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}
