//! Flat `key = value` pipeline configuration.
//!
//! Lines whose first non-blank character is `#` are comments; values may
//! contain `#` (namespace IRIs often do). Relative paths are resolved against
//! the directory holding the config file.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::embed::TrainingConfig;
use crate::error::{Error, Result};
use crate::iri::{Iri, PrefixMap, OBO, OBO_IN_OWL, RDFS_LABEL};
use crate::pairnet::{MlpConfig, SplitMode};

pub const DEFAULT_RELATION: &str = "http://purl.obolibrary.org/obo/RO_0000085";

/// The six annotation properties compared by the default ablation.
pub const ABLATION_DEFAULT: [&str; 6] = ["label", "description", "synonym", "created_by", "creation_date", "namespace"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Corpus,
    Pretrain,
    Embed,
    Similarity,
    Resnik,
    Classify,
    Evaluate,
    All,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        Ok(match s {
            "corpus" => Mode::Corpus,
            "pretrain" => Mode::Pretrain,
            "embed" => Mode::Embed,
            "similarity" => Mode::Similarity,
            "resnik" => Mode::Resnik,
            "classify" => Mode::Classify,
            "evaluate" => Mode::Evaluate,
            "all" => Mode::All,
            other => return Err(Error::InvalidConfig(format!("unknown mode {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PropertySelection {
    All,
    Only(BTreeSet<Iri>),
}

impl PropertySelection {
    pub fn none() -> Self {
        PropertySelection::Only(BTreeSet::new())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub ontology: PathBuf,
    pub associations: Option<PathBuf>,
    pub association_relation: Iri,
    pub pairs: Option<PathBuf>,
    pub pretrain_corpus: Option<PathBuf>,
    pub output: PathBuf,
    pub prefixes: PrefixMap,
    pub annotation_properties: PropertySelection,
    pub excluded_evidence: BTreeSet<String>,
    pub training: TrainingConfig,
    pub pretraining: TrainingConfig,
    pub classifier: bool,
    pub mlp: MlpConfig,
    pub split: SplitMode,
    pub test_fraction: f64,
    pub seed: u64,
    pub workers: usize,
    pub mode: Mode,
    pub ablate_properties: Vec<String>,
}

impl PipelineConfig {
    /// Defaults for everything but the ontology path.
    pub fn new(ontology: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            ontology: ontology.into(),
            associations: None,
            association_relation: Iri::new(DEFAULT_RELATION).expect("valid IRI"),
            pairs: None,
            pretrain_corpus: None,
            output: output.into(),
            prefixes: PrefixMap::common(),
            annotation_properties: PropertySelection::All,
            excluded_evidence: ["IEA", "ND"].iter().map(|s| s.to_string()).collect(),
            training: TrainingConfig::default(),
            pretraining: TrainingConfig::pretraining(),
            classifier: true,
            mlp: MlpConfig::default(),
            split: SplitMode::ByEntity,
            test_fraction: 0.3,
            seed: 1,
            workers: 1,
            mode: Mode::All,
            ablate_properties: ABLATION_DEFAULT.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected `key = value`", i + 1)))?;
            entries.push((i + 1, key.trim().to_string(), value.trim().to_string()));
        }

        // prefixes first so property lists can use any declared CURIE
        let mut prefixes = PrefixMap::common();
        for (_, key, value) in &entries {
            if let Some(p) = key.strip_prefix("prefix.") {
                prefixes.insert(p, value.as_str());
            }
        }

        let path = |v: &str| -> Option<PathBuf> { (!v.is_empty()).then(|| base.join(v)) };
        let mut cfg = PipelineConfig::new(PathBuf::new(), base.join("output"));
        cfg.prefixes = prefixes;
        let mut have_ontology = false;
        let mut properties_raw = None;
        for (line, key, value) in &entries {
            let v = value.as_str();
            let err = |msg: String| Error::InvalidConfig(format!("line {line}: {key}: {msg}"));
            let num = |v: &str| -> Result<usize> { v.parse().map_err(|_| err(format!("expected an integer, got {v:?}"))) };
            let real = |v: &str| -> Result<f64> { v.parse().map_err(|_| err(format!("expected a number, got {v:?}"))) };
            let flag = |v: &str| -> Result<bool> {
                match v {
                    "1" | "true" | "yes" => Ok(true),
                    "0" | "false" | "no" => Ok(false),
                    _ => Err(err(format!("expected true/false, got {v:?}"))),
                }
            };
            match key.as_str() {
                k if k.starts_with("prefix.") => {}
                "ontology" => {
                    cfg.ontology = path(v).ok_or_else(|| err("empty path".into()))?;
                    have_ontology = true;
                }
                "associations" => cfg.associations = path(v),
                "association_relation" => {
                    cfg.association_relation = cfg.prefixes.expand_iri(v).map_err(|e| err(e.to_string()))?
                }
                "pairs" => cfg.pairs = path(v),
                "pretrain_corpus" => cfg.pretrain_corpus = path(v),
                "output" => cfg.output = path(v).ok_or_else(|| err("empty path".into()))?,
                "annotation_properties" => properties_raw = Some((*line, v.to_string())),
                "excluded_evidence" => cfg.excluded_evidence = split_list(v).map(str::to_string).collect(),
                "sg" => {
                    cfg.training.sg = flag(v)?;
                    cfg.pretraining.sg = cfg.training.sg;
                }
                "size" => {
                    cfg.training.size = num(v)?;
                    cfg.pretraining.size = cfg.training.size;
                }
                "min_count" => cfg.training.min_count = num(v)?,
                "window" => cfg.training.window = num(v)?,
                "iter" => cfg.training.iter = num(v)?,
                "negative" => cfg.training.negative = num(v)?,
                "alpha" => cfg.training.alpha = real(v)?,
                "sample" => cfg.training.sample = real(v)?,
                "pretrain.min_count" => cfg.pretraining.min_count = num(v)?,
                "pretrain.window" => cfg.pretraining.window = num(v)?,
                "pretrain.iter" => cfg.pretraining.iter = num(v)?,
                "pretrain.negative" => cfg.pretraining.negative = num(v)?,
                "pretrain.alpha" => cfg.pretraining.alpha = real(v)?,
                "pretrain.sample" => cfg.pretraining.sample = real(v)?,
                "classifier" => cfg.classifier = flag(v)?,
                "mlp.hidden" => {
                    cfg.mlp.hidden = split_list(v).map(num).collect::<Result<_>>()?;
                }
                "mlp.epochs" => cfg.mlp.epochs = num(v)?,
                "mlp.batch_size" => cfg.mlp.batch_size = num(v)?,
                "mlp.learning_rate" => cfg.mlp.learning_rate = real(v)?,
                "split" => {
                    cfg.split = match v {
                        "entity" => SplitMode::ByEntity,
                        "pair" => SplitMode::ByPair,
                        _ => return Err(err(format!("expected entity or pair, got {v:?}"))),
                    }
                }
                "test_fraction" => cfg.test_fraction = real(v)?,
                "seed" => cfg.seed = v.parse().map_err(|_| err(format!("expected an integer, got {v:?}")))?,
                "workers" => cfg.workers = num(v)?,
                "mode" => cfg.mode = v.parse().map_err(|e: Error| err(e.to_string()))?,
                "ablate_properties" => cfg.ablate_properties = split_list(v).map(str::to_string).collect(),
                _ => return Err(err("unknown key".into())),
            }
        }
        if !have_ontology {
            return Err(Error::InvalidConfig("missing required key `ontology`".into()));
        }
        if let Some((line, raw)) = properties_raw {
            cfg.annotation_properties = parse_selection(&raw, &cfg.prefixes)
                .map_err(|e| Error::InvalidConfig(format!("line {line}: annotation_properties: {e}")))?;
        }
        let (seed, workers) = (cfg.seed, cfg.workers);
        cfg.set_seed(seed);
        cfg.set_workers(workers);
        cfg.validate()?;
        Ok(cfg)
    }

    /// One seed drives embedding training, dataset sampling and the MLP.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.training.seed = seed;
        self.pretraining.seed = seed;
        self.mlp.seed = seed;
    }

    pub fn set_workers(&mut self, workers: usize) {
        self.workers = workers;
        self.training.workers = workers;
        self.pretraining.workers = workers;
    }

    pub fn validate(&self) -> Result<()> {
        if self.pretraining.size != self.training.size {
            return Err(Error::InvalidConfig("pre-training and training sizes differ".into()));
        }
        self.training.validate()?;
        self.pretraining.validate()?;
        self.mlp.validate()?;
        if !(0.0..1.0).contains(&self.test_fraction) {
            return Err(Error::InvalidConfig(format!(
                "test_fraction must be in [0, 1), got {}",
                self.test_fraction
            )));
        }
        Ok(())
    }

    /// Stable digest input: everything except the output directory.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.output = PathBuf::new();
        serde_json::to_string(&c).expect("config serializes")
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Corpus => "corpus",
            Mode::Pretrain => "pretrain",
            Mode::Embed => "embed",
            Mode::Similarity => "similarity",
            Mode::Resnik => "resnik",
            Mode::Classify => "classify",
            Mode::Evaluate => "evaluate",
            Mode::All => "all",
        };
        f.write_str(s)
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty())
}

/// Expands a property alias or CURIE/IRI to the property IRIs it stands for.
///
/// `synonym` covers the four oboInOwl synonym scopes.
pub fn resolve_property(name: &str, prefixes: &PrefixMap) -> Result<Vec<Iri>> {
    let iris: Vec<String> = match name {
        "label" => vec![RDFS_LABEL.into()],
        "description" => vec![format!("{OBO}IAO_0000115")],
        "synonym" => ["hasExactSynonym", "hasRelatedSynonym", "hasNarrowSynonym", "hasBroadSynonym"]
            .iter()
            .map(|s| format!("{OBO_IN_OWL}{s}"))
            .collect(),
        "created_by" => vec![format!("{OBO_IN_OWL}created_by")],
        "creation_date" => vec![format!("{OBO_IN_OWL}creation_date")],
        "namespace" | "hasOBONamespace" => vec![format!("{OBO_IN_OWL}hasOBONamespace")],
        other => match prefixes.expand_strict(other) {
            Some(iri) if iri.contains(':') => vec![iri],
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown annotation property {other:?} (not an alias, CURIE with a declared prefix, or <IRI>)"
                )))
            }
        },
    };
    iris.into_iter().map(Iri::new).collect()
}

pub fn is_alias(name: &str) -> bool {
    matches!(
        name,
        "label" | "description" | "synonym" | "created_by" | "creation_date" | "namespace" | "hasOBONamespace"
    )
}

fn parse_selection(raw: &str, prefixes: &PrefixMap) -> Result<PropertySelection> {
    match raw.trim() {
        "all" => Ok(PropertySelection::All),
        "none" | "" => Ok(PropertySelection::none()),
        list => {
            let mut set = BTreeSet::new();
            for name in split_list(list) {
                set.extend(resolve_property(name, prefixes)?);
            }
            Ok(PropertySelection::Only(set))
        }
    }
}
