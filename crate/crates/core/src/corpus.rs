//! Sentence generation from logical and annotation axioms.
//!
//! Logical axioms use a Manchester-like infix form (`C SubClassOf: D`,
//! `e InstanceOf: r some C`, `A EquivalentTo: B`, `A DisjointWith: B`) with
//! every IRI as one token. An annotation axiom becomes
//! `subject property value-tokens...`, one sentence per axiom however long the
//! value is.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::kb::{AnnotationAxiom, AxiomKind, ClassExpression, KnowledgeBase, LiteralKind, LogicalAxiom};
use crate::reasoner::SubsumptionClosure;

pub const SUBCLASS_OF: &str = "SubClassOf:";
pub const EQUIVALENT_TO: &str = "EquivalentTo:";
pub const DISJOINT_WITH: &str = "DisjointWith:";
pub const INSTANCE_OF: &str = "InstanceOf:";
pub const SOME: &str = "some";

const STRIP: &[char] = &['.', ',', ';', ':', '!', '?', '(', ')', '[', ']', '"', '\''];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Sentence(Vec<String>);

impl Sentence {
    /// Drops empty tokens and splits any token that contains whitespace;
    /// `None` if nothing is left.
    pub fn new<I, S>(tokens: I) -> Option<Sentence>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let tokens: Vec<String> = tokens
            .into_iter()
            .flat_map(|t| {
                t.as_ref()
                    .split_whitespace()
                    .map(str::to_string)
                    .collect::<Vec<_>>()
            })
            .collect();
        (!tokens.is_empty()).then_some(Sentence(tokens))
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_line(&self) -> String {
        self.0.join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceTag {
    Logical,
    Annotation,
    Pretrain,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub logical: usize,
    pub annotation: usize,
    pub pretrain: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    tags: Vec<SourceTag>,
}

impl Corpus {
    pub fn new() -> Self {
        Corpus::default()
    }

    pub fn push(&mut self, sentence: Sentence, tag: SourceTag) {
        self.sentences.push(sentence);
        self.tags.push(tag);
    }

    pub fn extend(&mut self, other: Corpus) {
        self.sentences.extend(other.sentences);
        self.tags.extend(other.tags);
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn tags(&self) -> &[SourceTag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn stats(&self) -> CorpusStats {
        let mut stats = CorpusStats {
            total: self.len(),
            ..Default::default()
        };
        for tag in &self.tags {
            match tag {
                SourceTag::Logical => stats.logical += 1,
                SourceTag::Annotation => stats.annotation += 1,
                SourceTag::Pretrain => stats.pretrain += 1,
            }
        }
        stats
    }

    /// One sentence per line, tokens separated by single spaces.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        for s in &self.sentences {
            writeln!(w, "{}", s.to_line())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("tokens are UTF-8")
    }

    /// Reads a corpus file written by [`Corpus::write_to`]. Tokens are taken
    /// verbatim (whitespace split only).
    pub fn read_from<R: BufRead>(reader: R, tag: SourceTag) -> io::Result<Corpus> {
        let mut corpus = Corpus::new();
        for line in reader.lines() {
            if let Some(s) = Sentence::new(line?.split_whitespace()) {
                corpus.push(s, tag);
            }
        }
        Ok(corpus)
    }
}

fn is_absolute_iri(t: &str) -> bool {
    t.starts_with("http://") || t.starts_with("https://") || t.starts_with("urn:")
}

fn is_curie(t: &str) -> bool {
    let Some((prefix, local)) = t.split_once(':') else {
        return false;
    };
    let mut pc = prefix.chars();
    matches!(pc.next(), Some(c) if c.is_ascii_alphabetic())
        && pc.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && matches!(local.chars().next(), Some(c) if c.is_alphanumeric() || c == '_')
}

/// Lowercases and splits on whitespace, trimming `.,;:!?()[]"'` from both
/// ends of each token. IRIs and CURIE-shaped tokens keep their case.
pub fn tokenize(value: &str) -> Vec<String> {
    let mut out = Vec::new();
    for raw in value.split_whitespace() {
        if let Some(inner) = raw.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
            if is_absolute_iri(inner) {
                out.push(inner.to_string());
                continue;
            }
        }
        let t = raw.trim_matches(STRIP);
        if t.is_empty() {
            continue;
        }
        if is_absolute_iri(t) || is_curie(t) {
            out.push(t.to_string());
        } else {
            out.push(t.to_lowercase());
        }
    }
    out
}

fn expression_tokens(expr: &ClassExpression, out: &mut Vec<String>) {
    match expr {
        ClassExpression::Named(iri) => out.push(iri.to_string()),
        ClassExpression::Existential { relation, filler } => {
            out.push(relation.to_string());
            out.push(SOME.to_string());
            expression_tokens(filler, out);
        }
    }
}

pub fn axiom_to_sentence(axiom: &LogicalAxiom) -> Sentence {
    let keyword = match axiom.kind {
        AxiomKind::SubClassOf => SUBCLASS_OF,
        AxiomKind::EquivalentClasses => EQUIVALENT_TO,
        AxiomKind::Disjoint => DISJOINT_WITH,
        AxiomKind::InstanceOf => INSTANCE_OF,
    };
    let mut tokens = vec![axiom.subject.to_string(), keyword.to_string()];
    expression_tokens(&axiom.object, &mut tokens);
    Sentence(tokens)
}

pub fn annotation_to_sentence(axiom: &AnnotationAxiom) -> Sentence {
    let mut tokens = vec![axiom.subject.to_string(), axiom.property.to_string()];
    match axiom.value.kind {
        LiteralKind::Iri => tokens.push(axiom.value.lexical.clone()),
        _ => tokens.extend(tokenize(&axiom.value.lexical)),
    }
    Sentence::new(tokens).expect("subject and property are non-empty")
}

/// Sorted, de-duplicated logical sentences (asserted and inferred) followed
/// by sorted annotation sentences.
pub fn build_corpus(kb: &KnowledgeBase, closure: &SubsumptionClosure) -> Corpus {
    let logical: BTreeMap<String, Sentence> = kb
        .logical_axioms
        .iter()
        .chain(&closure.inferred_axioms)
        .map(|a| {
            let s = axiom_to_sentence(a);
            (s.to_line(), s)
        })
        .collect();

    let mut annotation: Vec<(String, Sentence)> = kb
        .annotation_axioms
        .iter()
        .map(|a| {
            let s = annotation_to_sentence(a);
            (s.to_line(), s)
        })
        .collect();
    annotation.sort();

    let mut corpus = Corpus::new();
    for (_, s) in logical {
        corpus.push(s, SourceTag::Logical);
    }
    for (_, s) in annotation {
        corpus.push(s, SourceTag::Annotation);
    }
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iri::Iri;
    use crate::kb::Literal;
    use crate::reasoner::saturate;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn tokens(s: &Sentence) -> Vec<&str> {
        s.tokens().iter().map(String::as_str).collect()
    }

    #[test]
    fn subclass_sentence() {
        let ax = LogicalAxiom::subclass_of(iri("GO:0007610"), iri("GO:0008150"));
        assert_eq!(
            tokens(&axiom_to_sentence(&ax)),
            ["GO:0007610", "SubClassOf:", "GO:0008150"]
        );
    }

    #[test]
    fn instance_sentence() {
        let ax = LogicalAxiom::instance_of(
            iri("P0AAF6"),
            ClassExpression::some(iri("hasFunction"), ClassExpression::Named(iri("GO:0007610"))),
        );
        assert_eq!(
            tokens(&axiom_to_sentence(&ax)),
            ["P0AAF6", "InstanceOf:", "hasFunction", "some", "GO:0007610"]
        );
    }

    #[test]
    fn equivalence_sentence() {
        let ax = LogicalAxiom::equivalent(iri("A"), iri("B"));
        assert_eq!(tokens(&axiom_to_sentence(&ax)), ["A", "EquivalentTo:", "B"]);
    }

    #[test]
    fn label_sentence() {
        let ax = AnnotationAxiom::new(iri("C"), iri("rdfs:label"), Literal::string("behavior"));
        assert_eq!(tokens(&annotation_to_sentence(&ax)), ["C", "rdfs:label", "behavior"]);
    }

    #[test]
    fn description_is_one_sentence() {
        let ax = AnnotationAxiom::new(
            iri("C"),
            iri("obo:IAO_0000115"),
            Literal::string("First sentence. Second sentence."),
        );
        assert_eq!(
            tokens(&annotation_to_sentence(&ax)),
            ["C", "obo:IAO_0000115", "first", "sentence", "second", "sentence"]
        );
    }

    #[test]
    fn date_rendered_as_string() {
        let ax = AnnotationAxiom::new(
            iri("C"),
            iri("oboInOwl:creation_date"),
            Literal::date("2007-11-15"),
        );
        assert_eq!(
            tokens(&annotation_to_sentence(&ax)),
            ["C", "oboInOwl:creation_date", "2007-11-15"]
        );
    }

    #[test]
    fn tokenizer_rules() {
        assert_eq!(
            tokenize("The reproduction of new individuals."),
            ["the", "reproduction", "of", "new", "individuals"]
        );
        assert_eq!(tokenize("GO:0008150"), ["GO:0008150"]);
        assert_eq!(tokenize("multi-organism process"), ["multi-organism", "process"]);
        assert_eq!(tokenize("snake_case (Word)"), ["snake_case", "word"]);
        assert_eq!(
            tokenize("see <http://x.org/A> and http://x.org/B."),
            ["see", "http://x.org/A", "and", "http://x.org/B"]
        );
        assert!(tokenize(" ... !! ").is_empty());
    }

    #[test]
    fn corpus_counts_and_order() {
        let mut kb = KnowledgeBase::new();
        kb.add_logical(LogicalAxiom::subclass_of(iri("A"), iri("B")));
        kb.add_logical(LogicalAxiom::subclass_of(iri("B"), iri("C")));
        kb.add_annotation(AnnotationAxiom::new(iri("A"), iri("rdfs:label"), Literal::string("a")));
        let closure = saturate(&kb);
        let corpus = build_corpus(&kb, &closure);
        assert_eq!(corpus.len(), 4);
        let stats = corpus.stats();
        assert_eq!((stats.logical, stats.annotation), (3, 1));
        assert_eq!(
            corpus.to_text(),
            "A SubClassOf: B\nA SubClassOf: C\nB SubClassOf: C\nA rdfs:label a\n"
        );
    }

    #[test]
    fn filtered_annotations_give_logical_only() {
        let mut kb = KnowledgeBase::new();
        kb.add_logical(LogicalAxiom::subclass_of(iri("A"), iri("B")));
        kb.add_annotation(AnnotationAxiom::new(iri("A"), iri("rdfs:label"), Literal::string("a")));
        let kb = kb.filter_annotations_by_property(&Default::default());
        let corpus = build_corpus(&kb, &saturate(&kb));
        assert!(corpus.tags().iter().all(|t| *t == SourceTag::Logical));
    }

    #[test]
    fn read_back_is_verbatim() {
        let text = "A SubClassOf: B\nP InstanceOf: r some C\n";
        let corpus = Corpus::read_from(text.as_bytes(), SourceTag::Logical).unwrap();
        assert_eq!(corpus.to_text(), text);
    }
}
