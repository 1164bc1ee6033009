//! Random instance generators and brute-force oracles shared by the
//! integration tests. Oracles deliberately avoid the library's own
//! algorithms (no reasoner, no ROC sweep).

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use ontoembed::kb::{AnnotationAxiom, AxiomKind, ClassExpression, KnowledgeBase, Literal, LogicalAxiom};
use ontoembed::simsem::AnnotatedEntity;
use ontoembed::Iri;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NS: &str = "http://example.org/t/";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn iri(local: &str) -> Iri {
    Iri::new(format!("{NS}{local}")).unwrap()
}

pub fn class(i: usize) -> Iri {
    iri(&format!("C{i}"))
}

fn named(c: Iri) -> ClassExpression {
    ClassExpression::Named(c)
}

/// Mixed axiom kinds over `n_classes` classes, two relations and ten
/// individuals, including SubClassOf cycles, equivalences, nested
/// existentials and duplicates. The result is normalized.
pub fn random_ontology(rng: &mut impl Rng, n_classes: usize, n_axioms: usize) -> KnowledgeBase {
    let relations = [iri("r0"), iri("r1")];
    let mut kb = KnowledgeBase::new();
    for i in 0..n_classes {
        kb.declare_class(class(i));
    }
    let pick = |rng: &mut dyn rand::RngCore| class(rng.random_range(0..n_classes));
    for _ in 0..n_axioms {
        let roll = rng.random_range(0..100);
        let entity = iri(&format!("e{}", rng.random_range(0..10)));
        let r = relations.choose(rng).unwrap().clone();
        let axiom = match roll {
            0..45 => LogicalAxiom::subclass_of(pick(rng), pick(rng)),
            45..55 => LogicalAxiom::equivalent(pick(rng), pick(rng)),
            55..60 => LogicalAxiom::disjoint(pick(rng), pick(rng)),
            60..62 => LogicalAxiom::asserted(
                AxiomKind::SubClassOf,
                pick(rng),
                ClassExpression::some(r, named(pick(rng))),
            ),
            62..75 => LogicalAxiom::instance_of(entity, named(pick(rng))),
            75..95 => LogicalAxiom::instance_of(entity, ClassExpression::some(r, named(pick(rng)))),
            _ => LogicalAxiom::instance_of(
                entity,
                ClassExpression::some(r.clone(), ClassExpression::some(r, named(pick(rng)))),
            ),
        };
        kb.add_logical(axiom);
    }
    kb.normalize()
}

/// Adds label/comment annotations with awkward literal content.
pub fn add_random_annotations(rng: &mut impl Rng, kb: &mut KnowledgeBase, n: usize) {
    const WORDS: &[&str] = &[
        "alpha", "Beta", "binding,", "(kinase)", "\"quoted\"", "back\\slash", "naïve", "x-ray", "3'", "a\nb",
    ];
    let classes: Vec<Iri> = kb.classes.iter().cloned().collect();
    if classes.is_empty() {
        return;
    }
    let props = [
        Iri::new(ontoembed::iri::RDFS_LABEL).unwrap(),
        Iri::new(ontoembed::iri::RDFS_COMMENT).unwrap(),
    ];
    for _ in 0..n {
        let len = rng.random_range(1..5);
        let text: Vec<&str> = (0..len).map(|_| *WORDS.choose(rng).unwrap()).collect();
        kb.add_annotation(AnnotationAxiom::new(
            classes.choose(rng).unwrap().clone(),
            props.choose(rng).unwrap().clone(),
            Literal::string(text.join(" ")),
        ));
    }
}

pub struct OracleClosure {
    pub subsumptions: BTreeMap<Iri, BTreeSet<Iri>>,
    pub inferred: BTreeSet<LogicalAxiom>,
}

/// Rules applied by repeated full sweeps until nothing changes.
pub fn naive_saturate(kb: &KnowledgeBase) -> OracleClosure {
    let classes: Vec<Iri> = kb.classes.iter().cloned().collect();
    let index: BTreeMap<&Iri, usize> = classes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let n = classes.len();
    let mut sub = vec![vec![false; n]; n];
    for (i, row) in sub.iter_mut().enumerate() {
        row[i] = true;
    }
    for ax in &kb.logical_axioms {
        let ClassExpression::Named(o) = &ax.object else { continue };
        if !matches!(ax.kind, AxiomKind::SubClassOf | AxiomKind::EquivalentClasses) {
            continue;
        }
        let (s, o) = (index[&ax.subject], index[o]);
        match ax.kind {
            AxiomKind::SubClassOf => sub[s][o] = true,
            AxiomKind::EquivalentClasses => {
                sub[s][o] = true;
                sub[o][s] = true;
            }
            _ => {}
        }
    }
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if !sub[a][b] {
                    continue;
                }
                for c in 0..n {
                    if sub[b][c] && !sub[a][c] {
                        sub[a][c] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    // (entity, relation, class index); relation None for a plain class assertion
    let mut facts: BTreeSet<(Iri, Option<Iri>, usize)> = BTreeSet::new();
    for ax in kb.logical_axioms.iter().filter(|a| a.kind == AxiomKind::InstanceOf) {
        match &ax.object {
            ClassExpression::Named(c) => {
                facts.insert((ax.subject.clone(), None, index[c]));
            }
            ClassExpression::Existential { relation, filler } => {
                if let ClassExpression::Named(c) = filler.as_ref() {
                    facts.insert((ax.subject.clone(), Some(relation.clone()), index[c]));
                }
            }
        }
    }
    loop {
        let mut new = Vec::new();
        for (e, r, c) in &facts {
            for d in 0..n {
                if sub[*c][d] && !facts.contains(&(e.clone(), r.clone(), d)) {
                    new.push((e.clone(), r.clone(), d));
                }
            }
        }
        if new.is_empty() {
            break;
        }
        facts.extend(new);
    }

    let asserted: HashSet<(AxiomKind, &Iri, &ClassExpression)> =
        kb.logical_axioms.iter().map(|a| (a.kind, &a.subject, &a.object)).collect();
    let mut inferred = BTreeSet::new();
    let mut emit = |ax: LogicalAxiom| {
        if !asserted.contains(&(ax.kind, &ax.subject, &ax.object)) {
            inferred.insert(ax);
        }
    };
    let mut subsumptions = BTreeMap::new();
    for a in 0..n {
        let supers: BTreeSet<Iri> = (0..n).filter(|&b| sub[a][b]).map(|b| classes[b].clone()).collect();
        for b in (0..n).filter(|&b| b != a && sub[a][b]) {
            emit(LogicalAxiom::inferred(
                AxiomKind::SubClassOf,
                classes[a].clone(),
                named(classes[b].clone()),
            ));
        }
        subsumptions.insert(classes[a].clone(), supers);
    }
    for (e, r, c) in facts {
        let object = match r {
            Some(r) => ClassExpression::some(r, named(classes[c].clone())),
            None => named(classes[c].clone()),
        };
        emit(LogicalAxiom::inferred(AxiomKind::InstanceOf, e, object));
    }
    OracleClosure { subsumptions, inferred }
}

/// A DAG where class `i > 0` has up to three parents among lower indices,
/// with occasional extra roots, plus annotated entities.
pub struct AnnotatedDag {
    pub kb: KnowledgeBase,
    pub parents: Vec<Vec<usize>>,
    pub entities: Vec<AnnotatedEntity>,
}

pub fn random_annotated_dag(rng: &mut impl Rng, n_classes: usize, n_entities: usize) -> AnnotatedDag {
    let mut kb = KnowledgeBase::new();
    let mut parents = vec![Vec::new(); n_classes];
    kb.declare_class(class(0));
    for i in 1..n_classes {
        kb.declare_class(class(i));
        if rng.random_bool(0.08) {
            continue;
        }
        let k = rng.random_range(1..=3.min(i));
        let mut ps: Vec<usize> = (0..i).collect();
        let (chosen, _) = ps.partial_shuffle(rng, k);
        for &p in chosen.iter() {
            parents[i].push(p);
            kb.add_logical(LogicalAxiom::subclass_of(class(i), class(p)));
        }
    }
    let entities = (0..n_entities)
        .map(|e| {
            let k = rng.random_range(1..=4);
            let annotations: Vec<Iri> = (0..k).map(|_| class(rng.random_range(0..n_classes))).collect();
            AnnotatedEntity::new(iri(&format!("E{e}")), annotations)
        })
        .collect();
    AnnotatedDag { kb, parents, entities }
}

impl AnnotatedDag {
    /// Reflexive ancestors by depth-first walk over the parent lists.
    pub fn ancestors(&self, c: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![c];
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend(&self.parents[x]);
            }
        }
        seen
    }

    fn index_of(iri: &Iri) -> usize {
        iri.as_str().strip_prefix(&format!("{NS}C")).unwrap().parse().unwrap()
    }

    /// Entities whose annotation set reaches `c` through some member.
    pub fn count(&self, c: usize) -> usize {
        self.entities
            .iter()
            .filter(|e| e.annotations.iter().any(|a| self.ancestors(Self::index_of(a)).contains(&c)))
            .count()
    }

    pub fn ic(&self, c: usize) -> Option<f64> {
        let count = self.count(c);
        (count > 0).then(|| -(count as f64 / self.entities.len() as f64).ln())
    }

    /// Ancestor sets and IC values computed once for repeated queries.
    pub fn oracle(&self) -> DagOracle {
        let n = self.parents.len();
        DagOracle {
            ancestors: (0..n).map(|c| self.ancestors(c)).collect(),
            ic: (0..n).map(|c| self.ic(c)).collect(),
        }
    }
}

pub struct DagOracle {
    pub ancestors: Vec<BTreeSet<usize>>,
    pub ic: Vec<Option<f64>>,
}

impl DagOracle {
    pub fn resnik(&self, c1: usize, c2: usize) -> f64 {
        let mut best = 0.0;
        for c in &self.ancestors[c2] {
            if self.ancestors[c1].contains(c) {
                if let Some(ic) = self.ic[*c] {
                    if ic > best {
                        best = ic;
                    }
                }
            }
        }
        best
    }

    /// Best-match average written out term by term.
    pub fn bma(&self, e1: &AnnotatedEntity, e2: &AnnotatedEntity) -> f64 {
        let s1: Vec<usize> = e1.annotations.iter().map(AnnotatedDag::index_of).collect();
        let s2: Vec<usize> = e2.annotations.iter().map(AnnotatedDag::index_of).collect();
        let mut left = 0.0;
        for &a in &s1 {
            let mut m = f64::NEG_INFINITY;
            for &b in &s2 {
                m = m.max(self.resnik(a, b));
            }
            left += m;
        }
        let mut right = 0.0;
        for &b in &s2 {
            let mut m = f64::NEG_INFINITY;
            for &a in &s1 {
                m = m.max(self.resnik(a, b));
            }
            right += m;
        }
        0.5 * (left / s1.len() as f64 + right / s2.len() as f64)
    }
}

/// Fraction of (positive, negative) pairs ranked correctly, ties counting ½.
pub fn mann_whitney(scored: &[(f64, bool)]) -> f64 {
    let pos: Vec<f64> = scored.iter().filter(|s| s.1).map(|s| s.0).collect();
    let neg: Vec<f64> = scored.iter().filter(|s| !s.1).map(|s| s.0).collect();
    let mut twice = 0u64;
    for &p in &pos {
        for &n in &neg {
            twice += match p.partial_cmp(&n).unwrap() {
                std::cmp::Ordering::Greater => 2,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Less => 0,
            };
        }
    }
    twice as f64 / (2 * pos.len() * neg.len()) as f64
}

/// Scores drawn from a small grid so ties are common; both labels present.
pub fn random_scored_set(rng: &mut impl Rng, max_len: usize) -> Vec<(f64, bool)> {
    let n = rng.random_range(2..=max_len);
    let grid = rng.random_range(2..20);
    let mut out: Vec<(f64, bool)> = (0..n)
        .map(|_| (rng.random_range(0..grid) as f64 / grid as f64, rng.random_bool(0.4)))
        .collect();
    out[0].1 = true;
    out[1].1 = false;
    out
}

/// Central finite-difference check with a floor on the denominator.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// Worst relative error over `probes` random coordinates of the skip-gram
/// negative-sampling loss, split into (input, output) probes.
pub fn sgns_gradient_check(seed: u64, probes: usize) -> (f64, f64) {
    use ontoembed::embed::sgns::{loss, loss_and_gradients};
    let mut r = rng(seed);
    let (mut worst_in, mut worst_out) = (0.0f64, 0.0f64);
    let h = 1e-5;
    for _ in 0..probes {
        let dim = r.random_range(2..24);
        let k = r.random_range(1..8);
        let v: Vec<f64> = (0..dim).map(|_| r.random_range(-1.0..1.0)).collect();
        let u: Vec<f64> = (0..k * dim).map(|_| r.random_range(-1.0..1.0)).collect();
        let labels: Vec<bool> = (0..k).map(|i| i == 0).collect();
        let mut gv = vec![0.0; dim];
        let mut gu = vec![0.0; k * dim];
        loss_and_gradients(&v, &u, &labels, &mut gv, &mut gu);

        let d = r.random_range(0..dim);
        let (mut plus, mut minus) = (v.clone(), v.clone());
        plus[d] += h;
        minus[d] -= h;
        let numeric = (loss(&plus, &u, &labels) - loss(&minus, &u, &labels)) / (2.0 * h);
        worst_in = worst_in.max(relative_error(gv[d], numeric));

        let j = r.random_range(0..k * dim);
        let (mut plus, mut minus) = (u.clone(), u.clone());
        plus[j] += h;
        minus[j] -= h;
        let numeric = (loss(&v, &plus, &labels) - loss(&v, &minus, &labels)) / (2.0 * h);
        worst_out = worst_out.max(relative_error(gu[j], numeric));
    }
    (worst_in, worst_out)
}

/// Worst relative error over `probes` random weights and biases of a freshly
/// initialised network on a random 3-row batch.
pub fn mlp_gradient_check(seed: u64, sizes: &[usize], probes: usize) -> f64 {
    use ndarray::{Array1, Array2};
    use ontoembed::pairnet::Mlp;
    let mut r = rng(seed);
    let mut net = Mlp::new(sizes, &mut r);
    for layer in &mut net.layers {
        layer.bias.mapv_inplace(|_| r.random_range(-0.1..0.1));
    }
    let x = Array2::from_shape_simple_fn((3, sizes[0]), || r.random_range(-1.0..1.0));
    let y = Array1::from(vec![1.0, 0.0, 1.0]);
    let (_, grads) = net.loss_and_gradients(x.view(), y.view());
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let l = r.random_range(0..net.layers.len());
        let use_bias = r.random_bool(0.2);
        let (rows, cols) = net.layers[l].weight.dim();
        let (i, j) = (r.random_range(0..rows), r.random_range(0..cols));
        let analytic = if use_bias { grads[l].bias[j] } else { grads[l].weight[[i, j]] };
        let eval = |delta: f64| {
            let mut n = net.clone();
            if use_bias {
                n.layers[l].bias[j] += delta;
            } else {
                n.layers[l].weight[[i, j]] += delta;
            }
            n.loss(x.view(), y.view())
        };
        let numeric = (eval(h) - eval(-h)) / (2.0 * h);
        worst = worst.max(relative_error(analytic, numeric));
    }
    worst
}

/// A model over `e0..e{n}` whose vectors are `clusters` well separated
/// Gaussian blobs; entity `i` belongs to cluster `i % clusters`.
pub fn clustered_model(seed: u64, n: usize, clusters: usize, dim: usize, spread: f64) -> ontoembed::embed::EmbeddingModel {
    use ontoembed::embed::{train, TrainingConfig};
    let tokens: Vec<String> = (0..n).map(|i| iri(&format!("e{i}")).to_string()).collect();
    let corpus = ontoembed::parser::read_text_corpus(&tokens.join(" "));
    let cfg = TrainingConfig {
        size: dim,
        iter: 1,
        seed,
        ..Default::default()
    };
    let mut model = train(&corpus, &cfg, None).unwrap();
    let mut r = rng(seed);
    let centers: Vec<Vec<f64>> = (0..clusters)
        .map(|_| (0..dim).map(|_| r.random_range(-1.0..1.0)).collect())
        .collect();
    for (i, t) in tokens.iter().enumerate() {
        let row = model.vocab.get(t).unwrap();
        for d in 0..dim {
            model.input_vectors[row * dim + d] = centers[i % clusters][d] + spread * r.random_range(-1.0..1.0);
        }
    }
    model
}

pub fn entity(i: usize) -> Iri {
    iri(&format!("e{i}"))
}
