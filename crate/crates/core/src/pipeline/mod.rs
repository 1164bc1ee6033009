//! Staged pipeline. Every stage reads its inputs from the configured files or
//! from artifacts of earlier stages in the output directory, and writes its
//! own artifacts there.
//!
//! | stage      | reads                                   | writes                                 |
//! |------------|-----------------------------------------|----------------------------------------|
//! | corpus     | ontology, associations, pairs           | corpus.txt, corpus_stats.json, dataset.tsv |
//! | pretrain   | pretrain_corpus                         | pretrain.model                         |
//! | embed      | corpus.txt, pretrain.model              | embeddings.model, embeddings.vec       |
//! | similarity | dataset.tsv, embeddings.model           | scored_cosine.tsv                      |
//! | resnik     | ontology, associations, dataset.tsv     | scored_resnik.tsv                      |
//! | classify   | dataset.tsv, embeddings.model           | classifier.model, scored_mlp.tsv       |
//! | evaluate   | scored_*.tsv                            | auc_summary.tsv, roc_*.csv             |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::{build_corpus, Corpus, CorpusStats, SourceTag};
use crate::embed::{load_model, save_model, train, write_text_vectors, EmbeddingModel};
use crate::error::{Error, Result};
use crate::eval::{compare_methods, read_scored_pairs, write_scored_pairs, Report, ScoredPair};
use crate::iri::Iri;
use crate::kb::KnowledgeBase;
use crate::pairnet::{
    build_pair_dataset, load_classifier, save_classifier, score_pairs, train_mlp_with_losses, LabeledPair,
    PairDataset, Split,
};
use crate::parser::{parse_gaf_reader, parse_ontology_with_prefixes, parse_pairs_reader, read_text_corpus_reader};
use crate::reasoner::{saturate, SubsumptionClosure};
use crate::simsem::{cosine, information_content, resnik_bma, AnnotatedEntity};

mod config;

pub use config::{
    is_alias, resolve_property, Mode, PipelineConfig, PropertySelection, ABLATION_DEFAULT, DEFAULT_RELATION,
};

pub const CORPUS_FILE: &str = "corpus.txt";
pub const CORPUS_STATS_FILE: &str = "corpus_stats.json";
pub const DATASET_FILE: &str = "dataset.tsv";
pub const PRETRAIN_MODEL_FILE: &str = "pretrain.model";
pub const MODEL_FILE: &str = "embeddings.model";
pub const VECTORS_FILE: &str = "embeddings.vec";
pub const CLASSIFIER_FILE: &str = "classifier.model";
pub const SUMMARY_FILE: &str = "auc_summary.tsv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const ABLATION_FILE: &str = "ablation.tsv";
pub const ABLATION_DIR: &str = "ablation";

/// Methods in the order `evaluate` looks for their scores.
pub const METHODS: [&str; 3] = ["cosine", "resnik", "mlp"];

pub fn scored_file(method: &str) -> String {
    format!("scored_{method}.tsv")
}

pub fn roc_file(method: &str) -> String {
    format!("roc_{method}.csv")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Corpus,
    Pretrain,
    Embed,
    Similarity,
    Resnik,
    Classify,
    Evaluate,
    Ablate,
    Manifest,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Corpus => "corpus",
            Stage::Pretrain => "pretrain",
            Stage::Embed => "embed",
            Stage::Similarity => "similarity",
            Stage::Resnik => "resnik",
            Stage::Classify => "classify",
            Stage::Evaluate => "evaluate",
            Stage::Ablate => "ablate",
            Stage::Manifest => "manifest",
        };
        f.write_str(s)
    }
}

/// A failed stage. Input errors (bad config, unreadable or malformed input
/// files) exit with 2, everything else with 1.
#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct StageError {
    pub stage: Stage,
    pub input: bool,
    #[source]
    pub source: Error,
}

impl StageError {
    pub fn exit_code(&self) -> i32 {
        if self.input {
            2
        } else {
            1
        }
    }
}

fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse(_) | Error::InvalidConfig(_) | Error::InvalidIri(..) | Error::UnknownClass(_)
    )
}

trait InStage<T> {
    fn in_stage(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T> InStage<T> for Result<T> {
    fn in_stage(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|source| StageError {
            stage,
            input: is_input_error(&source),
            source,
        })
    }
}

type StageResult<T> = std::result::Result<T, StageError>;

fn open_input(path: &Path, what: &str) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {what} {}: {e}", path.display())))
}

fn artifact(cfg: &PipelineConfig, name: &str) -> PathBuf {
    cfg.output.join(name)
}

fn open_artifact(cfg: &PipelineConfig, name: &str) -> Result<BufReader<File>> {
    let path = artifact(cfg, name);
    File::open(&path).map(BufReader::new).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => Error::MissingArtifact(path.display().to_string()),
        _ => Error::Io(e),
    })
}

fn require_artifact(cfg: &PipelineConfig, name: &str) -> Result<PathBuf> {
    let path = artifact(cfg, name);
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::MissingArtifact(path.display().to_string()))
    }
}

fn write_artifact(cfg: &PipelineConfig, name: &str, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    fs::create_dir_all(&cfg.output)?;
    let path = artifact(cfg, name);
    let mut w = BufWriter::new(File::create(&path)?);
    f(&mut w)?;
    w.flush()?;
    info!("wrote {}", path.display());
    Ok(())
}

/// The filtered knowledge base with association axioms, its closure and the
/// annotation set of every associated entity.
#[derive(Debug, Clone)]
pub struct LoadedKb {
    pub kb: KnowledgeBase,
    pub closure: SubsumptionClosure,
    pub annotated: Vec<AnnotatedEntity>,
}

pub fn load_kb(cfg: &PipelineConfig) -> Result<LoadedKb> {
    let parsed = parse_ontology_with_prefixes(open_input(&cfg.ontology, "ontology")?, &cfg.ontology, &cfg.prefixes)?;
    for w in &parsed.warnings {
        warn!("{w}");
    }
    let mut kb = parsed.value;
    if let Some(path) = &cfg.associations {
        let mut prefixes = kb.prefixes.clone();
        prefixes.extend(&cfg.prefixes);
        let parsed = parse_gaf_reader(open_input(path, "associations")?, path, &cfg.association_relation, &prefixes)?;
        for w in &parsed.warnings {
            warn!("{w}");
        }
        for a in parsed.value {
            kb.add_association(a);
        }
    }
    let mut kb = kb
        .filter_associations_by_evidence(&cfg.excluded_evidence)
        .add_association_axioms()?;
    if let PropertySelection::Only(allowed) = &cfg.annotation_properties {
        kb = kb.filter_annotations_by_property(allowed);
    }
    let closure = saturate(&kb);
    let annotated = kb
        .annotation_sets()
        .into_iter()
        .map(|(id, classes)| AnnotatedEntity::new(id, classes))
        .collect();
    Ok(LoadedKb { kb, closure, annotated })
}

fn build_dataset(cfg: &PipelineConfig, pairs_path: &Path, loaded: &LoadedKb) -> Result<PairDataset> {
    let mut prefixes = loaded.kb.prefixes.clone();
    prefixes.extend(&cfg.prefixes);
    let parsed = parse_pairs_reader(open_input(pairs_path, "pairs")?, pairs_path, &prefixes)?;
    for w in &parsed.warnings {
        warn!("{w}");
    }
    let universe: Vec<Iri> = loaded.annotated.iter().map(|e| e.id.clone()).collect();
    let known: BTreeSet<&Iri> = universe.iter().collect();
    let (mut dropped, mut negatives) = (0, 0);
    let mut positives = Vec::new();
    for r in parsed.value {
        if r.label == Some(false) {
            negatives += 1;
        } else if known.contains(&r.a) && known.contains(&r.b) {
            positives.push((r.a, r.b));
        } else {
            dropped += 1;
        }
    }
    if negatives > 0 {
        warn!("{negatives} pairs labelled 0 ignored; negatives are sampled");
    }
    if dropped > 0 {
        warn!("{dropped} positive pairs dropped: entity has no associations");
    }
    build_pair_dataset(&positives, &universe, cfg.seed, cfg.test_fraction, cfg.split)
}

pub fn cmd_corpus(cfg: &PipelineConfig) -> StageResult<CorpusStats> {
    let stage = Stage::Corpus;
    let loaded = load_kb(cfg).in_stage(stage)?;
    let corpus = build_corpus(&loaded.kb, &loaded.closure);
    let stats = corpus.stats();
    write_artifact(cfg, CORPUS_FILE, |w| corpus.write_to(w).map_err(Error::from)).in_stage(stage)?;
    write_artifact(cfg, CORPUS_STATS_FILE, |w| {
        serde_json::to_writer_pretty(&mut *w, &stats).map_err(|e| Error::Io(e.into()))?;
        writeln!(w).map_err(Error::from)
    })
    .in_stage(stage)?;
    if let Some(pairs) = &cfg.pairs {
        let ds = build_dataset(cfg, pairs, &loaded).in_stage(stage)?;
        write_artifact(cfg, DATASET_FILE, |w| ds.write_tsv(w).map_err(Error::from)).in_stage(stage)?;
    }
    info!(
        "corpus: {} logical, {} annotation sentences",
        stats.logical, stats.annotation
    );
    Ok(stats)
}

pub fn cmd_pretrain(cfg: &PipelineConfig) -> StageResult<EmbeddingModel> {
    let stage = Stage::Pretrain;
    let path = cfg
        .pretrain_corpus
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("pretrain needs `pretrain_corpus`".into()))
        .in_stage(stage)?;
    let corpus = read_text_corpus_reader(open_input(path, "pre-training corpus").in_stage(stage)?).in_stage(stage)?;
    let model = train(&corpus, &cfg.pretraining, None).in_stage(stage)?;
    fs::create_dir_all(&cfg.output).map_err(Error::from).in_stage(stage)?;
    save_model(&model, &artifact(cfg, PRETRAIN_MODEL_FILE)).in_stage(stage)?;
    info!("pretrain: vocabulary of {}", model.len());
    Ok(model)
}

pub fn cmd_embed(cfg: &PipelineConfig) -> StageResult<EmbeddingModel> {
    let stage = Stage::Embed;
    let corpus = Corpus::read_from(open_artifact(cfg, CORPUS_FILE).in_stage(stage)?, SourceTag::Logical)
        .map_err(Error::from)
        .in_stage(stage)?;
    let init = match cfg.pretrain_corpus {
        Some(_) => Some(load_model(&require_artifact(cfg, PRETRAIN_MODEL_FILE).in_stage(stage)?).in_stage(stage)?),
        None => None,
    };
    let model = train(&corpus, &cfg.training, init.as_ref()).in_stage(stage)?;
    save_model(&model, &artifact(cfg, MODEL_FILE)).in_stage(stage)?;
    write_artifact(cfg, VECTORS_FILE, |w| write_text_vectors(&model, w)).in_stage(stage)?;
    Ok(model)
}

fn load_dataset(cfg: &PipelineConfig) -> Result<PairDataset> {
    PairDataset::read_tsv(open_artifact(cfg, DATASET_FILE)?)
}

/// Test pairs, or every pair when the test split lacks either label.
pub fn evaluation_pairs(ds: &PairDataset) -> Vec<LabeledPair> {
    if ds.count(Split::Test, true) > 0 && ds.count(Split::Test, false) > 0 {
        ds.split(Split::Test).cloned().collect()
    } else {
        ds.pairs.clone()
    }
}

fn write_scores(cfg: &PipelineConfig, method: &str, scored: &[ScoredPair]) -> Result<()> {
    write_artifact(cfg, &scored_file(method), |w| write_scored_pairs(scored, w).map_err(Error::from))
}

pub fn cmd_similarity(cfg: &PipelineConfig) -> StageResult<Vec<ScoredPair>> {
    let stage = Stage::Similarity;
    let ds = load_dataset(cfg).in_stage(stage)?;
    let model = load_model(&require_artifact(cfg, MODEL_FILE).in_stage(stage)?).in_stage(stage)?;
    let scored = evaluation_pairs(&ds)
        .into_iter()
        .map(|p| {
            let score = cosine(model.vector_of(p.a.as_str())?, model.vector_of(p.b.as_str())?)?;
            Ok(ScoredPair {
                a: p.a,
                b: p.b,
                label: p.label,
                score,
            })
        })
        .collect::<Result<Vec<_>>>()
        .in_stage(stage)?;
    write_scores(cfg, "cosine", &scored).in_stage(stage)?;
    Ok(scored)
}

pub fn cmd_resnik(cfg: &PipelineConfig) -> StageResult<Vec<ScoredPair>> {
    let stage = Stage::Resnik;
    let loaded = load_kb(cfg).in_stage(stage)?;
    let ds = load_dataset(cfg).in_stage(stage)?;
    let stats = information_content(&loaded.closure, &loaded.annotated).in_stage(stage)?;
    let by_id: BTreeMap<&Iri, &AnnotatedEntity> = loaded.annotated.iter().map(|e| (&e.id, e)).collect();
    let lookup = |id: &Iri| by_id.get(id).copied().ok_or_else(|| Error::EmptyAnnotations(id.to_string()));
    let scored = evaluation_pairs(&ds)
        .into_iter()
        .map(|p| {
            let score = resnik_bma(&stats, &loaded.closure, lookup(&p.a)?, lookup(&p.b)?)?;
            Ok(ScoredPair {
                a: p.a,
                b: p.b,
                label: p.label,
                score,
            })
        })
        .collect::<Result<Vec<_>>>()
        .in_stage(stage)?;
    write_scores(cfg, "resnik", &scored).in_stage(stage)?;
    Ok(scored)
}

pub fn cmd_classify(cfg: &PipelineConfig) -> StageResult<Vec<ScoredPair>> {
    let stage = Stage::Classify;
    let ds = load_dataset(cfg).in_stage(stage)?;
    let model = load_model(&require_artifact(cfg, MODEL_FILE).in_stage(stage)?).in_stage(stage)?;
    let (clf, losses) = train_mlp_with_losses(&ds, &model, &cfg.mlp).in_stage(stage)?;
    if let (Some(first), Some(last)) = (losses.first(), losses.last()) {
        info!("classify: loss {first:.4} -> {last:.4} over {} epochs", losses.len());
    }
    let path = artifact(cfg, CLASSIFIER_FILE);
    save_classifier(&clf, &path).in_stage(stage)?;
    // score with the reloaded checkpoint so the file is what produced the scores
    let clf = load_classifier(&path).in_stage(stage)?;
    let scored = score_pairs(&clf, &evaluation_pairs(&ds), &model, true).in_stage(stage)?;
    write_scores(cfg, "mlp", &scored).in_stage(stage)?;
    Ok(scored)
}

fn evaluate_methods(cfg: &PipelineConfig, methods: &[&str]) -> StageResult<Report> {
    let stage = Stage::Evaluate;
    let mut runs = Vec::new();
    for m in methods {
        let scored = read_scored_pairs(open_artifact(cfg, &scored_file(m)).in_stage(stage)?).in_stage(stage)?;
        runs.push((m.to_string(), scored));
    }
    let report = compare_methods(&runs).in_stage(stage)?;
    write_artifact(cfg, SUMMARY_FILE, |w| report.write_summary(w).map_err(Error::from)).in_stage(stage)?;
    for (method, roc) in &report.curves {
        write_artifact(cfg, &roc_file(method), |w| roc.write_csv(w).map_err(Error::from)).in_stage(stage)?;
    }
    for row in &report.rows {
        info!("evaluate: {} AUC {:.4}", row.method, row.auc);
    }
    Ok(report)
}

/// Evaluates every method whose scores are present in the output directory.
pub fn cmd_evaluate(cfg: &PipelineConfig) -> StageResult<Report> {
    let present: Vec<&str> = METHODS
        .iter()
        .copied()
        .filter(|m| artifact(cfg, &scored_file(m)).is_file())
        .collect();
    if present.is_empty() {
        return Err(Error::MissingArtifact(artifact(cfg, "scored_*.tsv").display().to_string())).in_stage(Stage::Evaluate);
    }
    evaluate_methods(cfg, &present)
}

/// Runs every configured stage and writes the manifest. Returns the
/// evaluation report when evaluation pairs are configured.
pub fn cmd_all(cfg: &PipelineConfig) -> StageResult<Option<Report>> {
    cfg.validate().in_stage(Stage::Corpus)?;
    if cfg.output.is_dir() {
        for m in METHODS {
            let stale = artifact(cfg, &scored_file(m));
            if stale.is_file() {
                fs::remove_file(stale).map_err(Error::from).in_stage(Stage::Evaluate)?;
            }
        }
    }
    cmd_corpus(cfg)?;
    if cfg.pretrain_corpus.is_some() {
        cmd_pretrain(cfg)?;
    }
    cmd_embed(cfg)?;
    let mut report = None;
    if cfg.pairs.is_some() {
        let mut methods = vec!["cosine"];
        cmd_similarity(cfg)?;
        if cfg.associations.is_some() {
            cmd_resnik(cfg)?;
            methods.push("resnik");
        }
        if cfg.classifier {
            cmd_classify(cfg)?;
            methods.push("mlp");
        }
        report = Some(evaluate_methods(cfg, &methods)?);
    }
    write_manifest(cfg).in_stage(Stage::Manifest)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub config_sha256: String,
    pub seed: u64,
    pub workers: usize,
    pub inputs: BTreeMap<String, String>,
    pub artifacts: BTreeMap<String, String>,
}

fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Hashes of the config, the inputs and every file in the output directory.
pub fn build_manifest(cfg: &PipelineConfig) -> Result<Manifest> {
    let mut inputs = BTreeMap::new();
    let named = [
        ("ontology", Some(&cfg.ontology)),
        ("associations", cfg.associations.as_ref()),
        ("pairs", cfg.pairs.as_ref()),
        ("pretrain_corpus", cfg.pretrain_corpus.as_ref()),
    ];
    for (name, path) in named {
        if let Some(path) = path {
            inputs.insert(name.to_string(), sha256_file(path)?);
        }
    }
    let mut artifacts = BTreeMap::new();
    for entry in fs::read_dir(&cfg.output)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if entry.file_type()?.is_file() && name != MANIFEST_FILE {
            artifacts.insert(name, sha256_file(&entry.path())?);
        }
    }
    Ok(Manifest {
        config_sha256: hex::encode(Sha256::digest(cfg.canonical_json().as_bytes())),
        seed: cfg.seed,
        workers: cfg.workers,
        inputs,
        artifacts,
    })
}

pub fn write_manifest(cfg: &PipelineConfig) -> Result<Manifest> {
    let manifest = build_manifest(cfg)?;
    write_artifact(cfg, MANIFEST_FILE, |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest).map_err(|e| Error::Io(e.into()))?;
        writeln!(w).map_err(Error::from)
    })?;
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub property: String,
    pub auc: f64,
    pub n_pos: u64,
    pub n_neg: u64,
}

/// Runs corpus → embed → cosine once per annotation property (given by alias
/// or CURIE/IRI) and writes `ablation.tsv`. An empty list runs once with no
/// annotation properties.
pub fn cmd_ablate(cfg: &PipelineConfig, properties: &[String]) -> StageResult<Vec<AblationRow>> {
    let stage = Stage::Ablate;
    if cfg.pairs.is_none() {
        return Err(Error::InvalidConfig("ablate needs `pairs`".into())).in_stage(stage);
    }
    let mut names: Vec<&str> = Vec::new();
    for p in properties {
        if names.contains(&p.as_str()) {
            warn!("ablate: duplicate property {p:?} ignored");
        } else {
            names.push(p);
        }
    }

    let mut runs: Vec<(String, PropertySelection)> = Vec::new();
    if names.is_empty() {
        runs.push(("none".into(), PropertySelection::none()));
    } else {
        let mut probe = cfg.clone();
        probe.annotation_properties = PropertySelection::All;
        let known = load_kb(&probe).in_stage(stage)?.kb;
        for name in names {
            let iris = resolve_property(name, &cfg.prefixes).in_stage(stage)?;
            if !is_alias(name) && !iris.iter().all(|i| known.properties.contains(i)) {
                return Err(Error::InvalidConfig(format!("unknown annotation property {name:?}"))).in_stage(stage);
            }
            runs.push((name.to_string(), PropertySelection::Only(iris.into_iter().collect())));
        }
    }

    let root = cfg.output.join(ABLATION_DIR);
    let pretrained = match cfg.pretrain_corpus {
        Some(_) => {
            let mut sub = cfg.clone();
            sub.output = root.clone();
            cmd_pretrain(&sub)?;
            Some(root.join(PRETRAIN_MODEL_FILE))
        }
        None => None,
    };
    let mut rows = Vec::new();
    for (name, selection) in runs {
        let mut sub = cfg.clone();
        sub.output = root.join(sanitize(&name));
        sub.annotation_properties = selection;
        cmd_corpus(&sub)?;
        if let Some(model) = &pretrained {
            fs::copy(model, artifact(&sub, PRETRAIN_MODEL_FILE))
                .map_err(Error::from)
                .in_stage(stage)?;
        }
        cmd_embed(&sub)?;
        let scored = cmd_similarity(&sub)?;
        let report = compare_methods(&[(name.clone(), scored)]).in_stage(stage)?;
        let r = &report.rows[0];
        info!("ablate: {name} AUC {:.4}", r.auc);
        rows.push(AblationRow {
            property: name,
            auc: r.auc,
            n_pos: r.n_pos,
            n_neg: r.n_neg,
        });
    }
    write_artifact(cfg, ABLATION_FILE, |w| {
        writeln!(w, "property\tauc\tn_pos\tn_neg")?;
        for r in &rows {
            writeln!(w, "{}\t{}\t{}\t{}", r.property, r.auc, r.n_pos, r.n_neg)?;
        }
        Ok(())
    })
    .in_stage(stage)?;
    Ok(rows)
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect()
}

/// Runs the stage named by `mode`.
pub fn run_mode(cfg: &PipelineConfig, mode: Mode) -> StageResult<()> {
    match mode {
        Mode::Corpus => cmd_corpus(cfg).map(drop),
        Mode::Pretrain => cmd_pretrain(cfg).map(drop),
        Mode::Embed => cmd_embed(cfg).map(drop),
        Mode::Similarity => cmd_similarity(cfg).map(drop),
        Mode::Resnik => cmd_resnik(cfg).map(drop),
        Mode::Classify => cmd_classify(cfg).map(drop),
        Mode::Evaluate => cmd_evaluate(cfg).map(drop),
        Mode::All => cmd_all(cfg).map(drop),
    }
}
