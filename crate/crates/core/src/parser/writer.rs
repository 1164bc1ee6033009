use std::fmt::Write;

use crate::iri::PrefixMap;
use crate::kb::{
    AnnotationAxiom, AxiomKind, ClassExpression, KnowledgeBase, Literal, LiteralKind, LogicalAxiom,
};

fn expression(expr: &ClassExpression, prefixes: &PrefixMap) -> String {
    match expr {
        ClassExpression::Named(iri) => prefixes.compact(iri),
        ClassExpression::Existential { relation, filler } => format!(
            "ObjectSomeValuesFrom({} {})",
            prefixes.compact(relation),
            expression(filler, prefixes)
        ),
    }
}

pub fn axiom_to_functional(axiom: &LogicalAxiom, prefixes: &PrefixMap) -> String {
    let subject = prefixes.compact(&axiom.subject);
    let object = expression(&axiom.object, prefixes);
    match axiom.kind {
        AxiomKind::SubClassOf => format!("SubClassOf({subject} {object})"),
        AxiomKind::EquivalentClasses => format!("EquivalentClasses({subject} {object})"),
        AxiomKind::Disjoint => format!("DisjointClasses({subject} {object})"),
        AxiomKind::InstanceOf => format!("ClassAssertion({object} {subject})"),
    }
}

fn literal(value: &Literal, prefixes: &PrefixMap) -> String {
    if value.kind == LiteralKind::Iri {
        if let Ok(iri) = crate::iri::Iri::new(value.lexical.clone()) {
            return prefixes.compact(&iri);
        }
    }
    let mut out = String::with_capacity(value.lexical.len() + 2);
    out.push('"');
    for c in value.lexical.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    match value.kind {
        LiteralKind::Date => out.push_str("^^xsd:dateTime"),
        LiteralKind::Number => out.push_str("^^xsd:decimal"),
        LiteralKind::String | LiteralKind::Iri => {}
    }
    out
}

fn annotation(axiom: &AnnotationAxiom, prefixes: &PrefixMap) -> String {
    format!(
        "AnnotationAssertion({} {} {})",
        prefixes.compact(&axiom.property),
        prefixes.compact(&axiom.subject),
        literal(&axiom.value, prefixes)
    )
}

/// Serializes the knowledge base (without associations) so that parsing the
/// result yields a structurally equal knowledge base.
pub fn to_functional_syntax(kb: &KnowledgeBase) -> String {
    let prefixes = &kb.prefixes;
    let mut out = String::new();
    for (prefix, ns) in prefixes.iter() {
        let _ = writeln!(out, "Prefix({prefix}:=<{ns}>)");
    }
    out.push_str("Ontology(\n");

    let annotation_props = kb.annotation_properties();
    for class in &kb.classes {
        let _ = writeln!(out, "Declaration(Class({}))", prefixes.compact(class));
    }
    for prop in &kb.properties {
        let kind = if annotation_props.contains(prop) {
            "AnnotationProperty"
        } else {
            "ObjectProperty"
        };
        let _ = writeln!(out, "Declaration({kind}({}))", prefixes.compact(prop));
    }
    for ind in &kb.individuals {
        let _ = writeln!(out, "Declaration(NamedIndividual({}))", prefixes.compact(ind));
    }
    for axiom in &kb.logical_axioms {
        out.push_str(&axiom_to_functional(axiom, prefixes));
        out.push('\n');
    }
    for axiom in &kb.annotation_axioms {
        out.push_str(&annotation(axiom, prefixes));
        out.push('\n');
    }
    out.push_str(")\n");
    out
}
