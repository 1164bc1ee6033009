//! In-memory knowledge base: classes, logical axioms, annotation axioms and
//! entity–class associations.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iri::{Iri, PrefixMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AxiomKind {
    SubClassOf,
    EquivalentClasses,
    Disjoint,
    InstanceOf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Asserted,
    Inferred,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassExpression {
    Named(Iri),
    /// `relation some filler`
    Existential {
        relation: Iri,
        filler: Box<ClassExpression>,
    },
}

impl ClassExpression {
    pub fn named(iri: Iri) -> Self {
        ClassExpression::Named(iri)
    }

    pub fn some(relation: Iri, filler: ClassExpression) -> Self {
        ClassExpression::Existential {
            relation,
            filler: Box::new(filler),
        }
    }

    pub fn as_named(&self) -> Option<&Iri> {
        match self {
            ClassExpression::Named(iri) => Some(iri),
            ClassExpression::Existential { .. } => None,
        }
    }

    /// Nesting depth; a named class has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            ClassExpression::Named(_) => 1,
            ClassExpression::Existential { filler, .. } => 1 + filler.depth(),
        }
    }

    /// Named class at the bottom of the expression.
    pub fn innermost_class(&self) -> &Iri {
        match self {
            ClassExpression::Named(iri) => iri,
            ClassExpression::Existential { filler, .. } => filler.innermost_class(),
        }
    }

    fn visit<'a>(&'a self, classes: &mut Vec<&'a Iri>, relations: &mut Vec<&'a Iri>) {
        match self {
            ClassExpression::Named(iri) => classes.push(iri),
            ClassExpression::Existential { relation, filler } => {
                relations.push(relation);
                filler.visit(classes, relations);
            }
        }
    }
}

impl fmt::Display for ClassExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassExpression::Named(iri) => write!(f, "{iri}"),
            ClassExpression::Existential { relation, filler } => {
                write!(f, "{relation} some {filler}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LogicalAxiom {
    pub kind: AxiomKind,
    pub subject: Iri,
    pub object: ClassExpression,
    pub provenance: Provenance,
}

impl LogicalAxiom {
    pub fn asserted(kind: AxiomKind, subject: Iri, object: ClassExpression) -> Self {
        LogicalAxiom {
            kind,
            subject,
            object,
            provenance: Provenance::Asserted,
        }
    }

    pub fn inferred(kind: AxiomKind, subject: Iri, object: ClassExpression) -> Self {
        LogicalAxiom {
            kind,
            subject,
            object,
            provenance: Provenance::Inferred,
        }
    }

    pub fn subclass_of(sub: Iri, sup: Iri) -> Self {
        Self::asserted(AxiomKind::SubClassOf, sub, ClassExpression::Named(sup))
    }

    pub fn equivalent(a: Iri, b: Iri) -> Self {
        Self::asserted(AxiomKind::EquivalentClasses, a, ClassExpression::Named(b))
    }

    pub fn disjoint(a: Iri, b: Iri) -> Self {
        Self::asserted(AxiomKind::Disjoint, a, ClassExpression::Named(b))
    }

    pub fn instance_of(entity: Iri, class: ClassExpression) -> Self {
        Self::asserted(AxiomKind::InstanceOf, entity, class)
    }

    /// Structural identity, ignoring provenance.
    pub fn key(&self) -> (AxiomKind, &Iri, &ClassExpression) {
        (self.kind, &self.subject, &self.object)
    }

    /// Trivially true axioms such as `A SubClassOf: A`.
    pub fn is_tautology(&self) -> bool {
        matches!(self.kind, AxiomKind::SubClassOf | AxiomKind::EquivalentClasses)
            && self.object.as_named() == Some(&self.subject)
    }

    /// Symmetric named-named axioms are stored with the smaller IRI first.
    fn canonical(mut self) -> Self {
        if matches!(self.kind, AxiomKind::EquivalentClasses | AxiomKind::Disjoint) {
            if let ClassExpression::Named(other) = &self.object {
                if *other < self.subject {
                    let other = other.clone();
                    self.object = ClassExpression::Named(std::mem::replace(&mut self.subject, other));
                }
            }
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LiteralKind {
    String,
    Date,
    Number,
    /// Annotation value that is itself an IRI.
    Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub lexical: String,
    pub kind: LiteralKind,
}

impl Literal {
    pub fn string(s: impl Into<String>) -> Self {
        Literal {
            lexical: s.into(),
            kind: LiteralKind::String,
        }
    }

    pub fn date(s: impl Into<String>) -> Self {
        Literal {
            lexical: s.into(),
            kind: LiteralKind::Date,
        }
    }

    pub fn number(s: impl Into<String>) -> Self {
        Literal {
            lexical: s.into(),
            kind: LiteralKind::Number,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AnnotationAxiom {
    pub subject: Iri,
    pub property: Iri,
    pub value: Literal,
}

impl AnnotationAxiom {
    pub fn new(subject: Iri, property: Iri, value: Literal) -> Self {
        AnnotationAxiom {
            subject,
            property,
            value,
        }
    }
}

/// `entity relation some class`, e.g. a protein and one of its GO functions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Association {
    pub entity: Iri,
    pub relation: Iri,
    pub class: Iri,
    pub evidence: Option<String>,
}

impl Association {
    pub fn new(entity: Iri, relation: Iri, class: Iri, evidence: Option<String>) -> Self {
        Association {
            entity,
            relation,
            class,
            evidence,
        }
    }
}

pub fn is_valid_evidence_code(code: &str) -> bool {
    !code.is_empty()
        && code
            .chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub prefixes: PrefixMap,
    pub classes: BTreeSet<Iri>,
    /// Object and annotation properties.
    pub properties: BTreeSet<Iri>,
    pub individuals: BTreeSet<Iri>,
    pub logical_axioms: Vec<LogicalAxiom>,
    pub annotation_axioms: Vec<AnnotationAxiom>,
    pub associations: Vec<Association>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        KnowledgeBase::default()
    }

    pub fn declare_class(&mut self, iri: Iri) {
        self.classes.insert(iri);
    }

    pub fn declare_property(&mut self, iri: Iri) {
        self.properties.insert(iri);
    }

    pub fn declare_individual(&mut self, iri: Iri) {
        self.individuals.insert(iri);
    }

    /// Adds an axiom and declares every IRI it mentions.
    pub fn add_logical(&mut self, axiom: LogicalAxiom) {
        self.declare_signature(&axiom);
        self.logical_axioms.push(axiom);
    }

    pub fn add_annotation(&mut self, axiom: AnnotationAxiom) {
        self.properties.insert(axiom.property.clone());
        self.annotation_axioms.push(axiom);
    }

    pub fn add_association(&mut self, association: Association) {
        self.individuals.insert(association.entity.clone());
        self.properties.insert(association.relation.clone());
        self.associations.push(association);
    }

    fn declare_signature(&mut self, axiom: &LogicalAxiom) {
        let mut classes = Vec::new();
        let mut relations = Vec::new();
        axiom.object.visit(&mut classes, &mut relations);
        if axiom.kind == AxiomKind::InstanceOf {
            self.individuals.insert(axiom.subject.clone());
        } else {
            self.classes.insert(axiom.subject.clone());
        }
        self.classes.extend(classes.into_iter().cloned());
        self.properties.extend(relations.into_iter().cloned());
    }

    /// Drops tautologies and structural duplicates; an axiom that is both
    /// asserted and inferred keeps the asserted provenance.
    pub fn normalize(&self) -> KnowledgeBase {
        let mut out = KnowledgeBase {
            prefixes: self.prefixes.clone(),
            classes: self.classes.clone(),
            properties: self.properties.clone(),
            individuals: self.individuals.clone(),
            ..Default::default()
        };

        let mut index = std::collections::HashMap::new();
        for axiom in &self.logical_axioms {
            if axiom.is_tautology() {
                continue;
            }
            let axiom = axiom.clone().canonical();
            let key = (axiom.kind, axiom.subject.clone(), axiom.object.clone());
            match index.get(&key) {
                Some(&i) => {
                    if axiom.provenance == Provenance::Asserted {
                        let existing: &mut LogicalAxiom = &mut out.logical_axioms[i];
                        existing.provenance = Provenance::Asserted;
                    }
                }
                None => {
                    index.insert(key, out.logical_axioms.len());
                    out.add_logical(axiom);
                }
            }
        }

        let mut seen = HashSet::new();
        for axiom in &self.annotation_axioms {
            if seen.insert(axiom) {
                out.add_annotation(axiom.clone());
            }
        }

        let mut seen = HashSet::new();
        for assoc in &self.associations {
            if seen.insert(assoc) {
                out.add_association(assoc.clone());
            }
        }
        out
    }

    /// Turns every association `(e, r, C)` into `e InstanceOf: r some C`.
    pub fn add_association_axioms(&self) -> Result<KnowledgeBase> {
        if let Some(bad) = self
            .associations
            .iter()
            .find(|a| !self.classes.contains(&a.class))
        {
            return Err(Error::UnknownClass(bad.class.to_string()));
        }
        let mut out = self.clone();
        let mut present: HashSet<(AxiomKind, Iri, ClassExpression)> = out
            .logical_axioms
            .iter()
            .map(|a| (a.kind, a.subject.clone(), a.object.clone()))
            .collect();
        for assoc in &self.associations {
            let object = ClassExpression::some(
                assoc.relation.clone(),
                ClassExpression::Named(assoc.class.clone()),
            );
            let key = (AxiomKind::InstanceOf, assoc.entity.clone(), object);
            if present.insert(key.clone()) {
                out.add_logical(LogicalAxiom::instance_of(key.1, key.2));
            }
        }
        Ok(out)
    }

    pub fn filter_annotations_by_property(&self, allowed: &BTreeSet<Iri>) -> KnowledgeBase {
        let mut out = self.clone();
        out.annotation_axioms.retain(|a| allowed.contains(&a.property));
        out
    }

    /// Removes associations whose evidence code is listed; rows without an
    /// evidence code are kept.
    pub fn filter_associations_by_evidence(&self, excluded: &BTreeSet<String>) -> KnowledgeBase {
        let mut out = self.clone();
        out.associations.retain(|a| match &a.evidence {
            Some(code) => !excluded.contains(code),
            None => true,
        });
        out
    }

    /// Distinct annotation properties actually used by annotation axioms.
    pub fn annotation_properties(&self) -> BTreeSet<Iri> {
        self.annotation_axioms
            .iter()
            .map(|a| a.property.clone())
            .collect()
    }

    /// Each associated entity with the set of classes it is annotated with.
    pub fn annotation_sets(&self) -> std::collections::BTreeMap<Iri, BTreeSet<Iri>> {
        let mut sets: std::collections::BTreeMap<Iri, BTreeSet<Iri>> = Default::default();
        for a in &self.associations {
            sets.entry(a.entity.clone())
                .or_default()
                .insert(a.class.clone());
        }
        sets
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn toy() -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        kb.add_logical(LogicalAxiom::subclass_of(iri("F"), iri("G")));
        kb.add_annotation(AnnotationAxiom::new(
            iri("F"),
            iri("rdfs:label"),
            Literal::string("f"),
        ));
        kb.add_annotation(AnnotationAxiom::new(
            iri("F"),
            iri("obo:IAO_0000115"),
            Literal::string("An f thing."),
        ));
        kb
    }

    #[test]
    fn association_becomes_existential_instance() {
        let mut kb = toy();
        kb.add_association(Association::new(iri("P1"), iri("has-function"), iri("F"), None));
        let out = kb.add_association_axioms().unwrap();
        let expected = LogicalAxiom::instance_of(
            iri("P1"),
            ClassExpression::some(iri("has-function"), ClassExpression::named(iri("F"))),
        );
        assert!(out.logical_axioms.contains(&expected));
        assert_eq!(out.logical_axioms.len(), kb.logical_axioms.len() + 1);
    }

    #[test]
    fn empty_associations_leave_kb_unchanged() {
        let kb = toy();
        assert_eq!(kb.add_association_axioms().unwrap(), kb);
    }

    #[test]
    fn duplicate_associations_yield_one_axiom_and_are_idempotent() {
        let mut kb = toy();
        for _ in 0..2 {
            kb.add_association(Association::new(iri("P1"), iri("r"), iri("F"), None));
        }
        let once = kb.add_association_axioms().unwrap();
        assert_eq!(once.logical_axioms.len(), 2);
        let twice = once.add_association_axioms().unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn distinct_relations_to_same_class_stay_distinct() {
        let mut kb = toy();
        kb.add_association(Association::new(iri("P1"), iri("r1"), iri("F"), None));
        kb.add_association(Association::new(iri("P1"), iri("r2"), iri("F"), None));
        let out = kb.add_association_axioms().unwrap();
        assert_eq!(out.logical_axioms.len(), 3);
    }

    #[test]
    fn unknown_association_class_is_named() {
        let mut kb = toy();
        kb.add_association(Association::new(iri("P1"), iri("r"), iri("NOPE"), None));
        match kb.add_association_axioms() {
            Err(Error::UnknownClass(c)) => assert_eq!(c, "NOPE"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn property_filter_keeps_only_allowed() {
        let kb = toy();
        let allowed: BTreeSet<_> = [iri("rdfs:label")].into();
        let out = kb.filter_annotations_by_property(&allowed);
        assert_eq!(out.annotation_axioms.len(), 1);
        assert_eq!(out.annotation_axioms[0].property, iri("rdfs:label"));
        assert_eq!(out.logical_axioms, kb.logical_axioms);

        let all = kb.filter_annotations_by_property(&kb.properties);
        assert_eq!(all, kb);

        let none = kb.filter_annotations_by_property(&BTreeSet::new());
        assert!(none.annotation_axioms.is_empty());
        assert_eq!(none.logical_axioms.len(), kb.logical_axioms.len());
    }

    #[test]
    fn evidence_filter() {
        let mut kb = toy();
        for (e, code) in [("P1", Some("IEA")), ("P2", Some("ND")), ("P3", Some("EXP")), ("P4", None)] {
            kb.add_association(Association::new(
                iri(e),
                iri("r"),
                iri("F"),
                code.map(String::from),
            ));
        }
        let excluded: BTreeSet<String> = ["IEA".to_string(), "ND".to_string()].into();
        let out = kb.filter_associations_by_evidence(&excluded);
        let kept: Vec<_> = out.associations.iter().map(|a| a.entity.as_str()).collect();
        assert_eq!(kept, ["P3", "P4"]);
        assert_eq!(out.logical_axioms, kb.logical_axioms);
        assert_eq!(kb.filter_associations_by_evidence(&BTreeSet::new()), kb);
    }

    #[test]
    fn normalize_drops_duplicates_and_tautologies() {
        let mut kb = toy();
        kb.add_logical(LogicalAxiom::subclass_of(iri("F"), iri("G")));
        kb.add_logical(LogicalAxiom::subclass_of(iri("F"), iri("F")));
        kb.add_logical(LogicalAxiom::equivalent(iri("B"), iri("A")));
        kb.add_logical(LogicalAxiom::equivalent(iri("A"), iri("B")));
        let mut inferred = LogicalAxiom::subclass_of(iri("X"), iri("Y"));
        inferred.provenance = Provenance::Inferred;
        kb.add_logical(inferred);
        kb.add_logical(LogicalAxiom::subclass_of(iri("X"), iri("Y")));

        let n = kb.normalize();
        assert_eq!(n.logical_axioms.len(), 3);
        assert!(n
            .logical_axioms
            .iter()
            .all(|a| a.provenance == Provenance::Asserted));
        assert_eq!(n.normalize(), n);
    }

    #[test]
    fn evidence_code_shape() {
        assert!(is_valid_evidence_code("IEA"));
        assert!(is_valid_evidence_code("HDA2"));
        assert!(!is_valid_evidence_code("iea"));
        assert!(!is_valid_evidence_code(""));
    }
}
