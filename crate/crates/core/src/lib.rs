//! Ontology embeddings from logical axioms plus annotation meta-data.
//!
//! The pipeline turns an ontology (OWL functional-style syntax subset) and
//! entity–class associations into a sentence corpus, trains skip-gram
//! embeddings on it (optionally continuing from a model pre-trained on plain
//! text) and evaluates similarity-based link prediction with ROC/AUC.
//!
//! Modules map onto the stages:
//!
//! * [`kb`] – in-memory knowledge base and filters
//! * [`parser`] – ontology, GAF, pair and text-corpus readers
//! * [`reasoner`] – subsumption saturation
//! * [`corpus`] – axiom/annotation sentence generation
//! * [`embed`] – skip-gram negative-sampling training and model files
//! * [`simsem`] – cosine, Resnik and best-match-average similarity
//! * [`pairnet`] – balanced pair datasets and the pair classifier
//! * [`eval`] – ROC curves and AUC
//! * [`pipeline`] – staged, file-based orchestration used by the CLI

pub mod corpus;
pub mod embed;
pub mod error;
pub mod eval;
pub mod iri;
pub mod kb;
pub mod pairnet;
pub mod parser;
pub mod pipeline;
pub mod reasoner;
pub mod simsem;
pub mod synthetic;

mod binio;

pub use error::{Error, Result};
pub use iri::{Iri, PrefixMap};
