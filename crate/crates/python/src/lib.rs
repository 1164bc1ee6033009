//! Python bindings: parse an ontology, build a corpus, train embeddings,
//! score similarities and evaluate them.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ontoembed::corpus::{self, SourceTag};
use ontoembed::embed::{self, TrainingConfig};
use ontoembed::eval;
use ontoembed::pairnet::{self, LabeledPair, MlpConfig, PairDataset, Split};
use ontoembed::parser;
use ontoembed::pipeline::{self, PipelineConfig};
use ontoembed::reasoner;
use ontoembed::simsem::{self, AnnotatedEntity, ConceptStats};
use ontoembed::Iri;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn iri(s: &str) -> PyResult<Iri> {
    Iri::new(s).map_err(err)
}

#[pyclass(name = "KnowledgeBase", module = "ontoembed_py")]
struct PyKnowledgeBase {
    inner: ontoembed::kb::KnowledgeBase,
}

#[pymethods]
impl PyKnowledgeBase {
    /// Parses OWL functional syntax.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let parsed = parser::parse_ontology(text).map_err(err)?;
        Ok(PyKnowledgeBase { inner: parsed.value })
    }

    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(err)?;
        Self::parse(&text)
    }

    #[getter]
    fn classes(&self) -> Vec<String> {
        self.inner.classes.iter().map(|c| c.to_string()).collect()
    }

    #[getter]
    fn n_logical_axioms(&self) -> usize {
        self.inner.logical_axioms.len()
    }

    #[getter]
    fn n_annotation_axioms(&self) -> usize {
        self.inner.annotation_axioms.len()
    }

    fn to_functional(&self) -> String {
        parser::to_functional_syntax(&self.inner)
    }

    fn saturate(&self) -> PyClosure {
        PyClosure {
            inner: reasoner::saturate(&self.inner),
        }
    }

    /// One sentence per asserted or inferred axiom and per annotation.
    fn corpus(&self, closure: &PyClosure) -> PyCorpus {
        PyCorpus {
            inner: corpus::build_corpus(&self.inner, &closure.inner),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "KnowledgeBase(classes={}, logical={}, annotations={})",
            self.inner.classes.len(),
            self.inner.logical_axioms.len(),
            self.inner.annotation_axioms.len()
        )
    }
}

#[pyclass(name = "Closure", module = "ontoembed_py")]
struct PyClosure {
    inner: reasoner::SubsumptionClosure,
}

#[pymethods]
impl PyClosure {
    /// Named superclasses, the class itself included.
    fn superclasses(&self, class: &str) -> PyResult<Vec<String>> {
        let supers = self.inner.superclasses(&iri(class)?).map_err(err)?;
        Ok(supers.iter().map(|c| c.to_string()).collect())
    }

    #[getter]
    fn n_inferred(&self) -> usize {
        self.inner.inferred_axioms.len()
    }
}

#[pyclass(name = "Corpus", module = "ontoembed_py")]
struct PyCorpus {
    inner: corpus::Corpus,
}

#[pymethods]
impl PyCorpus {
    /// Plain text, one sentence per line.
    #[staticmethod]
    fn from_text(text: &str) -> Self {
        PyCorpus {
            inner: parser::read_text_corpus(text),
        }
    }

    #[staticmethod]
    fn from_lines(lines: Vec<String>) -> Self {
        let mut inner = corpus::Corpus::new();
        for line in lines {
            if let Some(s) = corpus::Sentence::new(line.split_whitespace()) {
                inner.push(s, SourceTag::Logical);
            }
        }
        PyCorpus { inner }
    }

    fn sentences(&self) -> Vec<Vec<String>> {
        self.inner.sentences().iter().map(|s| s.tokens().to_vec()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(name = "EmbeddingModel", module = "ontoembed_py")]
struct PyEmbeddingModel {
    inner: embed::EmbeddingModel,
}

#[pymethods]
impl PyEmbeddingModel {
    /// Skip-gram with negative sampling. With `init`, training continues
    /// from that model and its vocabulary is extended.
    #[staticmethod]
    #[pyo3(signature = (corpus, size=200, window=5, min_count=1, negative=5, iter=5, alpha=0.025, seed=1, init=None))]
    #[allow(clippy::too_many_arguments)]
    fn train(
        py: Python<'_>,
        corpus: &PyCorpus,
        size: usize,
        window: usize,
        min_count: usize,
        negative: usize,
        iter: usize,
        alpha: f64,
        seed: u64,
        init: Option<&PyEmbeddingModel>,
    ) -> PyResult<Self> {
        let config = TrainingConfig {
            size,
            window,
            min_count,
            negative,
            iter,
            alpha,
            seed,
            ..Default::default()
        };
        let init = init.map(|m| &m.inner);
        let inner = py
            .detach(|| embed::train(&corpus.inner, &config, init))
            .map_err(err)?;
        Ok(PyEmbeddingModel { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyEmbeddingModel {
            inner: embed::load_model(&path).map_err(err)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        embed::save_model(&self.inner, &path).map_err(err)
    }

    fn vector(&self, token: &str) -> PyResult<Vec<f64>> {
        Ok(self.inner.vector_of(token).map_err(err)?.to_vec())
    }

    fn tokens(&self) -> Vec<String> {
        self.inner.vocab.tokens().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, token: &str) -> bool {
        self.inner.vocab.contains(token)
    }
}

#[pyfunction]
fn cosine(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    simsem::cosine(&a, &b).map_err(err)
}

/// Resnik and best-match average over a closure and entity annotations.
#[pyclass(name = "SemanticSimilarity", module = "ontoembed_py")]
struct PySemanticSimilarity {
    closure: reasoner::SubsumptionClosure,
    stats: ConceptStats,
    entities: BTreeMap<Iri, AnnotatedEntity>,
}

#[pymethods]
impl PySemanticSimilarity {
    #[new]
    fn new(closure: &PyClosure, annotations: BTreeMap<String, Vec<String>>) -> PyResult<Self> {
        let mut entities = BTreeMap::new();
        for (id, classes) in annotations {
            let id = iri(&id)?;
            let classes = classes.iter().map(|c| iri(c)).collect::<PyResult<Vec<_>>>()?;
            entities.insert(id.clone(), AnnotatedEntity::new(id, classes));
        }
        let list: Vec<AnnotatedEntity> = entities.values().cloned().collect();
        let stats = simsem::information_content(&closure.inner, &list).map_err(err)?;
        Ok(PySemanticSimilarity {
            closure: closure.inner.clone(),
            stats,
            entities,
        })
    }

    /// `None` when no entity is annotated below the class.
    fn ic(&self, class: &str) -> PyResult<Option<f64>> {
        Ok(self.stats.ic(&iri(class)?))
    }

    fn resnik(&self, c1: &str, c2: &str) -> PyResult<f64> {
        simsem::resnik(&self.stats, &self.closure, &iri(c1)?, &iri(c2)?).map_err(err)
    }

    fn bma(&self, e1: &str, e2: &str) -> PyResult<f64> {
        let get = |e: &str| -> PyResult<&AnnotatedEntity> {
            self.entities
                .get(&iri(e)?)
                .ok_or_else(|| PyValueError::new_err(format!("unknown entity {e}")))
        };
        simsem::resnik_bma(&self.stats, &self.closure, get(e1)?, get(e2)?).map_err(err)
    }
}

fn scored(scores: Vec<f64>, labels: Vec<bool>) -> PyResult<Vec<(f64, bool)>> {
    if scores.len() != labels.len() {
        return Err(PyValueError::new_err("scores and labels differ in length"));
    }
    Ok(scores.into_iter().zip(labels).collect())
}

#[pyfunction]
fn auc(scores: Vec<f64>, labels: Vec<bool>) -> PyResult<f64> {
    eval::auc_only(&scored(scores, labels)?).map_err(err)
}

/// Returns `(points, auc)` with points as `(fpr, tpr)`.
#[pyfunction]
fn roc_curve(scores: Vec<f64>, labels: Vec<bool>) -> PyResult<(Vec<(f64, f64)>, f64)> {
    let roc = eval::roc_curve(&scored(scores, labels)?).map_err(err)?;
    Ok((roc.points, roc.auc))
}

#[pyclass(name = "PairClassifier", module = "ontoembed_py")]
struct PyPairClassifier {
    inner: pairnet::PairClassifier,
}

#[pymethods]
impl PyPairClassifier {
    /// Trains on `(a, b, label)` triples using the model's vectors.
    #[staticmethod]
    #[pyo3(signature = (model, pairs, hidden=vec![800, 200], epochs=100, batch_size=32, learning_rate=0.01, seed=1))]
    fn train(
        py: Python<'_>,
        model: &PyEmbeddingModel,
        pairs: Vec<(String, String, bool)>,
        hidden: Vec<usize>,
        epochs: usize,
        batch_size: usize,
        learning_rate: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let pairs = pairs
            .into_iter()
            .map(|(a, b, label)| {
                Ok(LabeledPair {
                    a: iri(&a)?,
                    b: iri(&b)?,
                    label,
                    split: Split::Train,
                })
            })
            .collect::<PyResult<Vec<_>>>()?;
        let config = MlpConfig {
            hidden,
            epochs,
            batch_size,
            learning_rate,
            seed,
        };
        let ds = PairDataset { pairs };
        let inner = py
            .detach(|| pairnet::train_mlp(&ds, &model.inner, &config))
            .map_err(err)?;
        Ok(PyPairClassifier { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyPairClassifier {
            inner: pairnet::load_classifier(&path).map_err(err)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        pairnet::save_classifier(&self.inner, &path).map_err(err)
    }

    fn score(&self, model: &PyEmbeddingModel, a: &str, b: &str) -> PyResult<f64> {
        self.inner.score(&model.inner, &iri(a)?, &iri(b)?).map_err(err)
    }
}

/// Runs every stage for a config file; returns `(method, auc)` rows.
#[pyfunction]
#[pyo3(signature = (config, seed=None))]
fn run_pipeline(py: Python<'_>, config: PathBuf, seed: Option<u64>) -> PyResult<Vec<(String, f64)>> {
    let mut cfg = PipelineConfig::from_file(&config).map_err(err)?;
    if let Some(seed) = seed {
        cfg.set_seed(seed);
    }
    let report = py
        .detach(|| pipeline::cmd_all(&cfg))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(report
        .map(|r| r.rows.into_iter().map(|row| (row.method, row.auc)).collect())
        .unwrap_or_default())
}

#[pymodule]
fn ontoembed_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyKnowledgeBase>()?;
    m.add_class::<PyClosure>()?;
    m.add_class::<PyCorpus>()?;
    m.add_class::<PyEmbeddingModel>()?;
    m.add_class::<PySemanticSimilarity>()?;
    m.add_class::<PyPairClassifier>()?;
    m.add_function(wrap_pyfunction!(cosine, m)?)?;
    m.add_function(wrap_pyfunction!(auc, m)?)?;
    m.add_function(wrap_pyfunction!(roc_curve, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    Ok(())
}
