//! Skip-gram embeddings trained with negative sampling.
//!
//! [`train`] builds a vocabulary from the corpus and optimizes the objective
//! in [`sgns`]. Given an `init` model it extends that model's vocabulary
//! instead: shared tokens continue from their existing vectors, new tokens
//! get fresh vectors, and tokens missing from the new corpus are left
//! untouched.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

mod io;
pub mod sgns;
mod vocab;

pub use io::{load_model, save_model, write_text_vectors};
pub use vocab::{NoiseTable, Vocabulary, NOISE_POWER};

/// Final learning rate as a fraction of the starting one.
pub const MIN_ALPHA_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    /// Skip-gram when true; CBOW is accepted in configs but not trainable.
    pub sg: bool,
    pub size: usize,
    pub min_count: usize,
    /// Maximum distance between center and context word.
    pub window: usize,
    /// Epochs.
    pub iter: usize,
    /// Noise words per context word.
    pub negative: usize,
    pub alpha: f64,
    /// Frequent-word subsampling threshold; 0 disables it.
    pub sample: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            sg: true,
            size: 200,
            min_count: 1,
            window: 5,
            iter: 5,
            negative: 5,
            alpha: 0.025,
            sample: 0.0,
            seed: 1,
            workers: 1,
        }
    }
}

impl TrainingConfig {
    /// Settings for the plain-text pre-training model.
    pub fn pretraining() -> Self {
        TrainingConfig {
            min_count: 25,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.size == 0 {
            return bad("size must be > 0");
        }
        if self.window == 0 {
            return bad("window must be >= 1");
        }
        if self.iter == 0 {
            return bad("iter must be >= 1");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be > 0");
        }
        if !(self.sample >= 0.0 && self.sample.is_finite()) {
            return bad("sample must be >= 0");
        }
        if self.workers == 0 {
            return bad("workers must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub vocab: Vocabulary,
    /// `|V| × size`, row-major; these are the token vectors.
    pub input_vectors: Vec<f64>,
    /// `|V| × size`, row-major.
    pub output_vectors: Vec<f64>,
    pub config: TrainingConfig,
}

impl EmbeddingModel {
    pub fn dim(&self) -> usize {
        self.config.size
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vector_of(&self, token: &str) -> Result<&[f64]> {
        let idx = self
            .vocab
            .get(token)
            .ok_or_else(|| Error::UnknownToken(token.to_string()))?;
        Ok(self.input_row(idx))
    }

    pub fn input_row(&self, idx: usize) -> &[f64] {
        let d = self.dim();
        &self.input_vectors[idx * d..(idx + 1) * d]
    }

    pub fn output_row(&self, idx: usize) -> &[f64] {
        let d = self.dim();
        &self.output_vectors[idx * d..(idx + 1) * d]
    }

    pub fn is_finite(&self) -> bool {
        self.input_vectors
            .iter()
            .chain(&self.output_vectors)
            .all(|v| v.is_finite())
    }
}

/// Free-function form of [`EmbeddingModel::vector_of`].
pub fn vector_of<'a>(model: &'a EmbeddingModel, token: &str) -> Result<&'a [f64]> {
    model.vector_of(token)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainReport {
    /// Mean loss per (center, context) pair, one entry per epoch.
    pub epoch_losses: Vec<f64>,
    pub pairs_per_epoch: Vec<u64>,
}

pub fn train(corpus: &Corpus, config: &TrainingConfig, init: Option<&EmbeddingModel>) -> Result<EmbeddingModel> {
    train_with_report(corpus, config, init).map(|(m, _)| m)
}

pub fn train_with_report(
    corpus: &Corpus,
    config: &TrainingConfig,
    init: Option<&EmbeddingModel>,
) -> Result<(EmbeddingModel, TrainReport)> {
    config.validate()?;
    if !config.sg {
        return Err(Error::NotImplemented("CBOW training (sg=0); only skip-gram is supported"));
    }
    if let Some(init) = init {
        if init.config.size != config.size {
            return Err(Error::ConfigMismatch(format!(
                "initial model has size {}, config asks for {}",
                init.config.size, config.size
            )));
        }
    }

    let dim = config.size;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (vocab, corpus_counts, input, output) = match init {
        None => {
            let vocab = Vocabulary::build(corpus, config.min_count)?;
            let counts = vocab.counts().to_vec();
            let input = random_rows(vocab.len(), dim, &mut rng);
            let output = vec![0.0; vocab.len() * dim];
            (vocab, counts, input, output)
        }
        Some(init) => extend_vocabulary(corpus, config, init, &mut rng)?,
    };

    let sentences: Vec<Vec<u32>> = corpus
        .sentences()
        .iter()
        .map(|s| {
            s.tokens()
                .iter()
                .filter_map(|t| vocab.get(t).map(|i| i as u32))
                .collect::<Vec<_>>()
        })
        .filter(|s| s.len() > 1)
        .collect();

    let noise = NoiseTable::new(&corpus_counts);
    let keep = keep_probabilities(&corpus_counts, config.sample);
    let input = SharedMatrix::from_vec(input);
    let output = SharedMatrix::from_vec(output);
    let trainer = Trainer {
        config,
        dim,
        noise: &noise,
        keep: &keep,
        input: &input,
        output: &output,
        processed: AtomicUsize::new(0),
        total_words: sentences.iter().map(Vec::len).sum::<usize>() * config.iter,
    };

    let mut report = TrainReport::default();
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    for epoch in 0..config.iter {
        order.shuffle(&mut rng);
        let (loss, pairs) = if config.workers == 1 {
            let mut wrng = worker_rng(config.seed, epoch, 0);
            trainer.run(order.iter().map(|&i| sentences[i].as_slice()), &mut wrng)
        } else {
            let chunk = order.len().div_ceil(config.workers).max(1);
            std::thread::scope(|scope| {
                let handles: Vec<_> = order
                    .chunks(chunk)
                    .enumerate()
                    .map(|(w, part)| {
                        let trainer = &trainer;
                        let sentences = &sentences;
                        scope.spawn(move || {
                            let mut wrng = worker_rng(config.seed, epoch, w);
                            trainer.run(part.iter().map(|&i| sentences[i].as_slice()), &mut wrng)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("training worker panicked"))
                    .fold((0.0, 0), |(l, p), (l2, p2)| (l + l2, p + p2))
            })
        };
        report
            .epoch_losses
            .push(if pairs > 0 { loss / pairs as f64 } else { 0.0 });
        report.pairs_per_epoch.push(pairs);
    }

    let model = EmbeddingModel {
        vocab,
        input_vectors: input.into_vec(),
        output_vectors: output.into_vec(),
        config: config.clone(),
    };
    Ok((model, report))
}

fn worker_rng(seed: u64, epoch: usize, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((epoch as u64) << 16) | (worker as u64 + 1));
    rng
}

/// Uniform in `[-0.5/dim, 0.5/dim]`.
fn random_rows<R: Rng>(rows: usize, dim: usize, rng: &mut R) -> Vec<f64> {
    let scale = 1.0 / dim as f64;
    (0..rows * dim)
        .map(|_| (rng.random::<f64>() - 0.5) * scale)
        .collect()
}

type Extended = (Vocabulary, Vec<u64>, Vec<f64>, Vec<f64>);

fn extend_vocabulary<R: Rng>(
    corpus: &Corpus,
    config: &TrainingConfig,
    init: &EmbeddingModel,
    rng: &mut R,
) -> Result<Extended> {
    let dim = config.size;
    let counts = vocab::count_tokens(corpus);
    let mut vocab = init.vocab.clone();
    let mut corpus_counts = vec![0u64; vocab.len()];
    let mut input = init.input_vectors.clone();
    let mut output = init.output_vectors.clone();
    for (token, count) in vocab::sorted_by_frequency(counts) {
        match vocab.get(token) {
            Some(idx) => {
                vocab.add_count(idx, count);
                corpus_counts[idx] = count;
            }
            None if count >= config.min_count as u64 => {
                vocab.push(token.to_string(), count);
                corpus_counts.push(count);
                input.extend(random_rows(1, dim, rng));
                output.extend(std::iter::repeat_n(0.0, dim));
            }
            None => {}
        }
    }
    if corpus_counts.iter().all(|&c| c == 0) {
        return Err(Error::EmptyVocabulary(config.min_count));
    }
    Ok((vocab, corpus_counts, input, output))
}

/// Word2Vec-style keep probability per token; all ones when `sample` is 0.
fn keep_probabilities(counts: &[u64], sample: f64) -> Vec<f64> {
    if sample <= 0.0 {
        return vec![1.0; counts.len()];
    }
    let total: u64 = counts.iter().sum();
    let threshold = sample * total as f64;
    counts
        .iter()
        .map(|&c| {
            if c == 0 {
                return 1.0;
            }
            let c = c as f64;
            (((c / threshold).sqrt() + 1.0) * threshold / c).min(1.0)
        })
        .collect()
}

/// Weights shared between workers. Reads and writes are relaxed atomic
/// loads/stores of the f64 bit pattern: concurrent updates may overwrite each
/// other (hogwild), single-worker runs are exact.
struct SharedMatrix {
    data: Vec<AtomicU64>,
}

impl SharedMatrix {
    fn from_vec(v: Vec<f64>) -> Self {
        SharedMatrix {
            data: v.into_iter().map(|x| AtomicU64::new(x.to_bits())).collect(),
        }
    }

    fn into_vec(self) -> Vec<f64> {
        self.data
            .into_iter()
            .map(|a| f64::from_bits(a.into_inner()))
            .collect()
    }

    fn read_row(&self, row: usize, out: &mut [f64]) {
        let d = out.len();
        for (o, a) in out.iter_mut().zip(&self.data[row * d..(row + 1) * d]) {
            *o = f64::from_bits(a.load(Ordering::Relaxed));
        }
    }

    fn add_row(&self, row: usize, delta: &[f64], scale: f64) {
        let d = delta.len();
        for (a, x) in self.data[row * d..(row + 1) * d].iter().zip(delta) {
            let v = f64::from_bits(a.load(Ordering::Relaxed)) + scale * x;
            a.store(v.to_bits(), Ordering::Relaxed);
        }
    }
}

struct Trainer<'a> {
    config: &'a TrainingConfig,
    dim: usize,
    noise: &'a NoiseTable,
    keep: &'a [f64],
    input: &'a SharedMatrix,
    output: &'a SharedMatrix,
    processed: AtomicUsize,
    total_words: usize,
}

impl Trainer<'_> {
    fn learning_rate(&self) -> f64 {
        let done = self.processed.load(Ordering::Relaxed) as f64;
        let frac = 1.0 - done / (self.total_words as f64 + 1.0);
        self.config.alpha * frac.max(MIN_ALPHA_FRACTION)
    }

    /// Returns summed loss and number of (center, context) pairs.
    fn run<'s>(&self, sentences: impl Iterator<Item = &'s [u32]>, rng: &mut ChaCha8Rng) -> (f64, u64) {
        let dim = self.dim;
        let k_max = 1 + self.config.negative;
        let mut v = vec![0.0; dim];
        let mut outputs = vec![0.0; k_max * dim];
        let mut rows = Vec::with_capacity(k_max);
        let mut labels = Vec::with_capacity(k_max);
        let mut grad_in = vec![0.0; dim];
        let mut grad_out = vec![0.0; k_max * dim];
        let mut kept = Vec::new();
        let mut loss = 0.0;
        let mut pairs = 0u64;

        for sentence in sentences {
            kept.clear();
            kept.extend(
                sentence
                    .iter()
                    .copied()
                    .filter(|&w| self.keep[w as usize] >= 1.0 || rng.random::<f64>() < self.keep[w as usize]),
            );
            for (i, &center) in kept.iter().enumerate() {
                let lr = self.learning_rate();
                let reach = rng.random_range(1..=self.config.window);
                let lo = i.saturating_sub(reach);
                let hi = (i + reach).min(kept.len() - 1);
                for (j, &context) in kept.iter().enumerate().take(hi + 1).skip(lo) {
                    if j == i {
                        continue;
                    }
                    rows.clear();
                    labels.clear();
                    rows.push(context as usize);
                    labels.push(true);
                    for _ in 0..self.config.negative {
                        match self.noise.sample(rng) {
                            Some(n) if n != context as usize => {
                                rows.push(n);
                                labels.push(false);
                            }
                            _ => {}
                        }
                    }
                    self.input.read_row(center as usize, &mut v);
                    for (k, &r) in rows.iter().enumerate() {
                        self.output.read_row(r, &mut outputs[k * dim..(k + 1) * dim]);
                    }
                    let k = rows.len();
                    loss += sgns::loss_and_gradients(
                        &v,
                        &outputs[..k * dim],
                        &labels,
                        &mut grad_in,
                        &mut grad_out[..k * dim],
                    );
                    pairs += 1;
                    for (k, &r) in rows.iter().enumerate() {
                        self.output.add_row(r, &grad_out[k * dim..(k + 1) * dim], -lr);
                    }
                    self.input.add_row(center as usize, &grad_in, -lr);
                }
                self.processed.fetch_add(1, Ordering::Relaxed);
            }
            // dropped (subsampled) words still count towards the schedule
            self.processed
                .fetch_add(sentence.len() - kept.len(), Ordering::Relaxed);
        }
        (loss, pairs)
    }
}
