//! Subsumption saturation over a small rule set:
//!
//! * R1 `A ⊑ B, B ⊑ C ⟹ A ⊑ C`
//! * R2 `A ≡ B ⟹ A ⊑ B, B ⊑ A`
//! * R3 `e : r some C, C ⊑ D ⟹ e : r some D` (also for plain `e : C`)
//!
//! Only named classes take part in R1/R2. R3 looks one level into an
//! existential; deeper nesting is left untouched. Subsumptions are computed
//! by one BFS per class, `O(|classes| · |subclass edges|)` overall.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::iri::{Iri, PrefixMap};
use crate::kb::{AxiomKind, ClassExpression, KnowledgeBase, LogicalAxiom};
use crate::parser::axiom_to_functional;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubsumptionClosure {
    /// Every named superclass of each class, including the class itself.
    pub subsumptions: BTreeMap<Iri, BTreeSet<Iri>>,
    /// Entailed axioms not already asserted, sorted and duplicate-free.
    pub inferred_axioms: Vec<LogicalAxiom>,
}

impl SubsumptionClosure {
    pub fn superclasses(&self, class: &Iri) -> Result<&BTreeSet<Iri>> {
        self.subsumptions
            .get(class)
            .ok_or_else(|| Error::UnknownClass(class.to_string()))
    }

    pub fn contains(&self, class: &Iri) -> bool {
        self.subsumptions.contains_key(class)
    }

    pub fn classes(&self) -> impl Iterator<Item = &Iri> {
        self.subsumptions.keys()
    }

    /// One inferred axiom per line in functional syntax.
    pub fn dump_inferred(&self, prefixes: &PrefixMap) -> String {
        let mut out = String::new();
        for axiom in &self.inferred_axioms {
            out.push_str(&axiom_to_functional(axiom, prefixes));
            out.push('\n');
        }
        out
    }
}

/// Free-function form of [`SubsumptionClosure::superclasses`].
pub fn superclasses<'a>(closure: &'a SubsumptionClosure, class: &Iri) -> Result<&'a BTreeSet<Iri>> {
    closure.superclasses(class)
}

pub fn saturate(kb: &KnowledgeBase) -> SubsumptionClosure {
    let mut edges: BTreeMap<&Iri, Vec<&Iri>> = kb.classes.iter().map(|c| (c, Vec::new())).collect();
    for axiom in &kb.logical_axioms {
        let Some(object) = axiom.object.as_named() else {
            continue;
        };
        match axiom.kind {
            AxiomKind::SubClassOf => {
                edges.entry(&axiom.subject).or_default().push(object);
                edges.entry(object).or_default();
            }
            AxiomKind::EquivalentClasses => {
                edges.entry(&axiom.subject).or_default().push(object);
                edges.entry(object).or_default().push(&axiom.subject);
            }
            AxiomKind::Disjoint | AxiomKind::InstanceOf => {}
        }
    }

    let mut subsumptions = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &start in edges.keys() {
        let mut seen: BTreeSet<Iri> = BTreeSet::new();
        seen.insert(start.clone());
        queue.clear();
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            for &next in &edges[c] {
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        subsumptions.insert(start.clone(), seen);
    }

    let asserted: HashSet<(AxiomKind, &Iri, &ClassExpression)> =
        kb.logical_axioms.iter().map(LogicalAxiom::key).collect();
    let mut inferred = BTreeSet::new();
    let mut emit = |axiom: LogicalAxiom| {
        if !asserted.contains(&axiom.key()) {
            inferred.insert(axiom);
        }
    };

    for (class, supers) in &subsumptions {
        for sup in supers.iter().filter(|s| *s != class) {
            emit(LogicalAxiom::inferred(
                AxiomKind::SubClassOf,
                class.clone(),
                ClassExpression::Named(sup.clone()),
            ));
        }
    }

    for axiom in kb.logical_axioms.iter().filter(|a| a.kind == AxiomKind::InstanceOf) {
        let (relation, class) = match &axiom.object {
            ClassExpression::Named(c) => (None, c),
            ClassExpression::Existential { relation, filler } => match filler.as_ref() {
                ClassExpression::Named(c) => (Some(relation), c),
                ClassExpression::Existential { .. } => continue,
            },
        };
        let Some(supers) = subsumptions.get(class) else {
            continue;
        };
        for sup in supers.iter().filter(|s| *s != class) {
            let named = ClassExpression::Named(sup.clone());
            let object = match relation {
                Some(r) => ClassExpression::some(r.clone(), named),
                None => named,
            };
            emit(LogicalAxiom::inferred(
                AxiomKind::InstanceOf,
                axiom.subject.clone(),
                object,
            ));
        }
    }

    SubsumptionClosure {
        subsumptions,
        inferred_axioms: inferred.into_iter().collect(),
    }
}
