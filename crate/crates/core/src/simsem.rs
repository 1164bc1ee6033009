//! Similarity measures: cosine over vectors, Resnik over the class
//! hierarchy, and best-match average over annotation sets.
//!
//! Information content uses the natural log. A class no entity is annotated
//! with (directly or through a descendant) has no defined IC and is never
//! chosen as the most informative common ancestor.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iri::Iri;
use crate::reasoner::SubsumptionClosure;

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimMismatch(a.len(), b.len()));
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedEntity {
    pub id: Iri,
    pub annotations: BTreeSet<Iri>,
}

impl AnnotatedEntity {
    pub fn new(id: Iri, annotations: impl IntoIterator<Item = Iri>) -> Self {
        AnnotatedEntity {
            id,
            annotations: annotations.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConceptStats {
    /// Entities annotated with the class or one of its descendants.
    pub counts: BTreeMap<Iri, u64>,
    /// Number of annotated entities.
    pub total: u64,
    pub p: BTreeMap<Iri, f64>,
    /// `-ln p`, only for classes with a non-zero count.
    pub ic: BTreeMap<Iri, f64>,
}

impl ConceptStats {
    pub fn ic(&self, class: &Iri) -> Option<f64> {
        self.ic.get(class).copied()
    }

    pub fn p(&self, class: &Iri) -> Option<f64> {
        self.p.get(class).copied()
    }
}

pub fn information_content(closure: &SubsumptionClosure, entities: &[AnnotatedEntity]) -> Result<ConceptStats> {
    let mut counts: BTreeMap<Iri, u64> = closure.classes().map(|c| (c.clone(), 0)).collect();
    for entity in entities {
        if entity.annotations.is_empty() {
            return Err(Error::EmptyAnnotations(entity.id.to_string()));
        }
        let mut ancestors = BTreeSet::new();
        for class in &entity.annotations {
            ancestors.extend(closure.superclasses(class)?);
        }
        for a in ancestors {
            *counts.get_mut(a).expect("closure classes were seeded") += 1;
        }
    }
    let total = entities.len() as u64;
    let mut p = BTreeMap::new();
    let mut ic = BTreeMap::new();
    for (class, &count) in &counts {
        if count > 0 {
            let prob = count as f64 / total as f64;
            p.insert(class.clone(), prob);
            ic.insert(class.clone(), -prob.ln());
        }
    }
    Ok(ConceptStats { counts, total, p, ic })
}

/// IC of the most informative common ancestor; 0 when the classes share no
/// ancestor with a defined IC.
pub fn resnik(stats: &ConceptStats, closure: &SubsumptionClosure, c1: &Iri, c2: &Iri) -> Result<f64> {
    let a1 = closure.superclasses(c1)?;
    let a2 = closure.superclasses(c2)?;
    let (small, large) = if a1.len() <= a2.len() { (a1, a2) } else { (a2, a1) };
    Ok(small
        .iter()
        .filter(|c| large.contains(*c))
        .filter_map(|c| stats.ic(c))
        .fold(0.0, f64::max))
}

/// Best-match average of a pairwise class similarity over two annotation sets.
pub fn bma(
    e1: &AnnotatedEntity,
    e2: &AnnotatedEntity,
    mut pairwise: impl FnMut(&Iri, &Iri) -> Result<f64>,
) -> Result<f64> {
    for e in [e1, e2] {
        if e.annotations.is_empty() {
            return Err(Error::EmptyAnnotations(e.id.to_string()));
        }
    }
    let s1: Vec<&Iri> = e1.annotations.iter().collect();
    let s2: Vec<&Iri> = e2.annotations.iter().collect();
    let mut table = vec![0.0; s1.len() * s2.len()];
    for (i, a) in s1.iter().enumerate() {
        for (j, b) in s2.iter().enumerate() {
            table[i * s2.len() + j] = pairwise(a, b)?;
        }
    }
    let rows: f64 = (0..s1.len())
        .map(|i| {
            table[i * s2.len()..(i + 1) * s2.len()]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    let cols: f64 = (0..s2.len())
        .map(|j| {
            (0..s1.len())
                .map(|i| table[i * s2.len() + j])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    Ok(0.5 * (rows / s1.len() as f64 + cols / s2.len() as f64))
}

pub fn resnik_bma(
    stats: &ConceptStats,
    closure: &SubsumptionClosure,
    e1: &AnnotatedEntity,
    e2: &AnnotatedEntity,
) -> Result<f64> {
    bma(e1, e2, |a, b| resnik(stats, closure, a, b))
}

/// `entity1 entity2 score`, tab separated.
pub fn write_similarity_tsv<W: Write>(rows: &[(Iri, Iri, f64)], mut w: W) -> io::Result<()> {
    for (a, b, s) in rows {
        writeln!(w, "{a}\t{b}\t{s}")?;
    }
    Ok(())
}
