//! Small synthetic knowledge bases with a known cluster structure.
//!
//! Classes fall into function clusters. The class hierarchy ignores the
//! clusters (every class hangs off a hub chosen at random), so only the
//! annotation vocabulary and the associations carry cluster information.
//! Each cluster's vocabulary has two synonym variants; a class uses one
//! variant throughout, and only the pre-training text mixes them.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::iri::{Iri, PrefixMap, OBO, OBO_IN_OWL, RDFS_LABEL};
use crate::kb::{AnnotationAxiom, Association, KnowledgeBase, Literal, LogicalAxiom};
use crate::parser::to_functional_syntax;

pub const NAMESPACE: &str = "http://example.org/synth/";
pub const RELATION: &str = "http://purl.obolibrary.org/obo/RO_0000085";

const SYL_A: [&str; 8] = ["ka", "lo", "mi", "ne", "pu", "ra", "si", "to"];
const SYL_B: [&str; 8] = ["bel", "dor", "fin", "gam", "hul", "jex", "kov", "lur"];
const FILLERS: [&str; 8] = ["the", "of", "in", "involved", "process", "activity", "cellular", "regulation"];
/// Pre-training words that never occur in the ontology.
const BACKGROUND: [&str; 10] = [
    "patients", "study", "results", "observed", "samples", "analysis", "measured", "increased", "compared", "levels",
];
const CURATORS: [&str; 4] = ["curator_a", "curator_b", "curator_c", "curator_d"];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub seed: u64,
    /// Including the root and the hubs.
    pub n_classes: usize,
    pub n_clusters: usize,
    pub n_hubs: usize,
    pub n_entities: usize,
    pub concepts_per_cluster: usize,
    pub annotations_per_entity: usize,
    /// Probability that an association points into another cluster.
    pub association_noise: f64,
    /// Probability that `created_by` names a random curator.
    pub creator_noise: f64,
    pub pretrain_sentences: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            seed: 1,
            n_classes: 60,
            n_clusters: 2,
            n_hubs: 6,
            n_entities: 40,
            concepts_per_cluster: 8,
            annotations_per_entity: 3,
            association_noise: 0.1,
            creator_noise: 0.2,
            pretrain_sentences: 1500,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    /// Ontology only; associations are kept apart as they go to a GAF file.
    pub kb: KnowledgeBase,
    pub associations: Vec<Association>,
    /// Within-cluster entity pairs.
    pub positives: Vec<(Iri, Iri)>,
    pub pretrain_text: String,
    pub entity_cluster: BTreeMap<Iri, usize>,
    pub class_cluster: BTreeMap<Iri, usize>,
}

#[derive(Debug, Clone)]
pub struct SyntheticFiles {
    pub ontology: PathBuf,
    pub associations: PathBuf,
    pub pairs: PathBuf,
    pub pretrain: PathBuf,
}

fn word(cluster: usize, concept: usize, variant: usize, per_cluster: usize) -> String {
    let id = (cluster * per_cluster + concept) * 2 + variant;
    format!("{}{}{}", SYL_A[id % 8], SYL_B[(id / 8) % 8], if id >= 64 { (id / 64).to_string() } else { String::new() })
}

fn syn(local: &str) -> Iri {
    Iri::new(format!("{NAMESPACE}{local}")).expect("valid synthetic IRI")
}

pub fn property(local: &str) -> Iri {
    let iri = match local {
        "label" => RDFS_LABEL.to_string(),
        "description" => format!("{OBO}IAO_0000115"),
        other => format!("{OBO_IN_OWL}{other}"),
    };
    Iri::new(iri).expect("valid property IRI")
}

pub fn generate(config: &SyntheticConfig) -> SyntheticData {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let c = config;
    let per = c.concepts_per_cluster;
    let mut kb = KnowledgeBase::new();
    let mut prefixes = PrefixMap::common();
    prefixes.insert("syn", NAMESPACE);
    kb.prefixes = prefixes;

    let class = |i: usize| syn(&format!("C{i:03}"));
    let root = class(0);
    kb.declare_class(root.clone());
    let hubs: Vec<Iri> = (1..=c.n_hubs).map(class).collect();
    for h in &hubs {
        kb.add_logical(LogicalAxiom::subclass_of(h.clone(), root.clone()));
    }

    let annotate = |kb: &mut KnowledgeBase, subject: &Iri, prop: &str, value: Literal| {
        kb.add_annotation(AnnotationAxiom::new(subject.clone(), property(prop), value));
    };
    let filler = |rng: &mut ChaCha8Rng| *FILLERS.choose(rng).expect("non-empty");

    annotate(&mut kb, &root, "label", Literal::string("synthetic function"));
    for (h, hub) in hubs.iter().enumerate() {
        let label = format!("{} {} group {}", filler(&mut rng), filler(&mut rng), h + 1);
        annotate(&mut kb, hub, "label", Literal::string(label));
    }

    let mut class_cluster = BTreeMap::new();
    let mut leaves_by_cluster: Vec<Vec<Iri>> = vec![Vec::new(); c.n_clusters];
    for i in c.n_hubs + 1..c.n_classes {
        let cls = class(i);
        let cluster = i % c.n_clusters;
        let variant = rng.random_range(0..2);
        let hub = hubs.choose(&mut rng).expect("at least one hub").clone();
        kb.add_logical(LogicalAxiom::subclass_of(cls.clone(), hub));

        let mut concepts: Vec<usize> = (0..per).collect();
        concepts.shuffle(&mut rng);
        let w = |k: usize| word(cluster, concepts[k % per], variant, per);
        let label = format!("{} {} {}", w(0), w(1), filler(&mut rng));
        let description = format!(
            "the {} of {} {} involved in {} {}",
            w(2),
            w(0),
            filler(&mut rng),
            w(3),
            filler(&mut rng)
        );
        let synonym = format!("{} {}", w(1), w(4));
        let curator = if rng.random_bool(c.creator_noise) {
            *CURATORS.choose(&mut rng).expect("non-empty")
        } else {
            CURATORS[cluster % CURATORS.len()]
        };
        let date = format!(
            "{}-{:02}-{:02}T{:02}:{:02}:00Z",
            rng.random_range(2005..2019),
            rng.random_range(1..13),
            rng.random_range(1..29),
            rng.random_range(0..24),
            rng.random_range(0..60)
        );
        annotate(&mut kb, &cls, "label", Literal::string(label));
        annotate(&mut kb, &cls, "description", Literal::string(description));
        annotate(&mut kb, &cls, "hasExactSynonym", Literal::string(synonym));
        annotate(&mut kb, &cls, "created_by", Literal::string(curator));
        annotate(&mut kb, &cls, "creation_date", Literal::date(date));
        annotate(&mut kb, &cls, "hasOBONamespace", Literal::string("synthetic_function"));
        class_cluster.insert(cls.clone(), cluster);
        leaves_by_cluster[cluster].push(cls);
    }
    for prop in ["label", "description", "hasExactSynonym", "created_by", "creation_date", "hasOBONamespace"] {
        kb.declare_property(property(prop));
    }

    let relation = Iri::new(RELATION).expect("valid relation IRI");
    let mut associations = Vec::new();
    let mut entity_cluster = BTreeMap::new();
    for e in 0..c.n_entities {
        let entity = syn(&format!("E{e:03}"));
        let cluster = e % c.n_clusters;
        let mut chosen: Vec<Iri> = Vec::new();
        while chosen.len() < c.annotations_per_entity {
            let from = if c.n_clusters > 1 && rng.random_bool(c.association_noise) {
                (cluster + rng.random_range(1..c.n_clusters)) % c.n_clusters
            } else {
                cluster
            };
            let cls = leaves_by_cluster[from].choose(&mut rng).expect("non-empty cluster").clone();
            if !chosen.contains(&cls) {
                chosen.push(cls);
            }
        }
        for cls in chosen {
            associations.push(Association::new(entity.clone(), relation.clone(), cls, Some("IDA".into())));
        }
        // electronic annotations are pure noise and filtered by default
        if e % 4 == 0 {
            let all: Vec<&Iri> = leaves_by_cluster.iter().flatten().collect();
            let cls = (*all.choose(&mut rng).expect("non-empty")).clone();
            associations.push(Association::new(entity.clone(), relation.clone(), cls, Some("IEA".into())));
        }
        entity_cluster.insert(entity, cluster);
    }

    let entities: Vec<&Iri> = entity_cluster.keys().collect();
    let mut positives = Vec::new();
    for (i, a) in entities.iter().enumerate() {
        for b in &entities[i + 1..] {
            if entity_cluster[*a] == entity_cluster[*b] {
                positives.push(((*a).clone(), (*b).clone()));
            }
        }
    }

    let mut pretrain_text = String::new();
    for _ in 0..c.pretrain_sentences {
        let cluster = rng.random_range(0..c.n_clusters);
        let mut tokens = Vec::new();
        for _ in 0..6 {
            let concept = rng.random_range(0..per);
            tokens.push(word(cluster, concept, rng.random_range(0..2), per));
            if rng.random_bool(0.5) {
                tokens.push(filler(&mut rng).to_string());
            }
        }
        pretrain_text.push_str(&tokens.join(" "));
        pretrain_text.push_str(".\n");
    }
    let mut brng = ChaCha8Rng::seed_from_u64(c.seed ^ 0x6261_636b);
    for _ in 0..c.pretrain_sentences / 5 {
        let tokens: Vec<&str> = (0..6).map(|_| *BACKGROUND.choose(&mut brng).expect("non-empty")).collect();
        pretrain_text.push_str(&tokens.join(" "));
        pretrain_text.push_str(".\n");
    }

    SyntheticData {
        kb: kb.normalize(),
        associations,
        positives,
        pretrain_text,
        entity_cluster,
        class_cluster,
    }
}

impl SyntheticData {
    /// Writes `ontology.ofn`, `associations.gaf`, `pairs.tsv` and
    /// `pretrain.txt` into `dir`.
    pub fn write_files(&self, dir: &Path) -> Result<SyntheticFiles> {
        fs::create_dir_all(dir)?;
        let files = SyntheticFiles {
            ontology: dir.join("ontology.ofn"),
            associations: dir.join("associations.gaf"),
            pairs: dir.join("pairs.tsv"),
            pretrain: dir.join("pretrain.txt"),
        };
        fs::write(&files.ontology, to_functional_syntax(&self.kb))?;

        let compact = |iri: &Iri| self.kb.prefixes.compact(iri);
        let mut gaf = Vec::new();
        writeln!(gaf, "!gaf-version: 2.2")?;
        for a in &self.associations {
            let local = a.entity.as_str().trim_start_matches(NAMESPACE);
            writeln!(
                gaf,
                "SYN\t{}\t{local}\t\t{}\tSYN:REF\t{}",
                compact(&a.entity),
                compact(&a.class),
                a.evidence.as_deref().unwrap_or("")
            )?;
        }
        fs::write(&files.associations, gaf)?;

        let mut pairs = Vec::new();
        for (a, b) in &self.positives {
            writeln!(pairs, "{}\t{}", compact(a), compact(b))?;
        }
        fs::write(&files.pairs, pairs)?;
        fs::write(&files.pretrain, &self.pretrain_text)?;
        Ok(files)
    }
}

/// Pipeline config for the files written by [`SyntheticData::write_files`],
/// with paths relative to the same directory.
pub fn pipeline_config(seed: u64) -> String {
    format!(
        "\
# synthetic run, seed {seed}
ontology = ontology.ofn
associations = associations.gaf
pairs = pairs.tsv
pretrain_corpus = pretrain.txt
output = output
prefix.syn = {NAMESPACE}
annotation_properties = all
excluded_evidence = IEA, ND
iter = 20
pretrain.min_count = 25
split = pair
test_fraction = 0.3
seed = {seed}
workers = 1
"
    )
}
