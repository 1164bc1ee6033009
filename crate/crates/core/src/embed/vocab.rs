use std::collections::HashMap;

use rand::Rng;

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Exponent applied to unigram counts for the negative-sampling distribution.
pub const NOISE_POWER: f64 = 0.75;

/// Token ↔ index bijection with frequency counts. Indices are ordered by
/// descending count, ties broken by token.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    index: HashMap<String, usize>,
    tokens: Vec<String>,
    counts: Vec<u64>,
}

pub(crate) fn count_tokens(corpus: &Corpus) -> HashMap<&str, u64> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for s in corpus.sentences() {
        for t in s.tokens() {
            *counts.entry(t.as_str()).or_default() += 1;
        }
    }
    counts
}

pub(crate) fn sorted_by_frequency<'a>(counts: impl IntoIterator<Item = (&'a str, u64)>) -> Vec<(&'a str, u64)> {
    let mut v: Vec<_> = counts.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    v
}

impl Vocabulary {
    pub fn build(corpus: &Corpus, min_count: usize) -> Result<Vocabulary> {
        let counts = count_tokens(corpus);
        let mut vocab = Vocabulary::default();
        for (token, count) in sorted_by_frequency(counts) {
            if count >= min_count as u64 {
                vocab.push(token.to_string(), count);
            }
        }
        if vocab.is_empty() {
            return Err(Error::EmptyVocabulary(min_count));
        }
        Ok(vocab)
    }

    pub(crate) fn from_parts(tokens: Vec<String>, counts: Vec<u64>) -> Result<Vocabulary> {
        if tokens.len() != counts.len() {
            return Err(Error::Format("vocabulary token/count length mismatch".into()));
        }
        let mut vocab = Vocabulary::default();
        for (t, c) in tokens.into_iter().zip(counts) {
            if vocab.index.contains_key(&t) {
                return Err(Error::Format(format!("duplicate vocabulary token {t:?}")));
            }
            vocab.push(t, c);
        }
        Ok(vocab)
    }

    pub(crate) fn push(&mut self, token: String, count: u64) -> usize {
        let idx = self.tokens.len();
        self.index.insert(token.clone(), idx);
        self.tokens.push(token);
        self.counts.push(count);
        idx
    }

    pub(crate) fn add_count(&mut self, idx: usize, count: u64) {
        self.counts[idx] += count;
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn token(&self, idx: usize) -> &str {
        &self.tokens[idx]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, token: &str) -> Option<u64> {
        self.get(token).map(|i| self.counts[i])
    }

    pub fn noise_table(&self) -> NoiseTable {
        NoiseTable::new(&self.counts)
    }
}

/// Cumulative unigram^0.75 distribution sampled by binary search.
#[derive(Debug, Clone)]
pub struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    pub fn new(counts: &[u64]) -> NoiseTable {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(NOISE_POWER);
                acc
            })
            .collect();
        NoiseTable { cumulative }
    }

    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Probability of drawing `idx`.
    pub fn probability(&self, idx: usize) -> f64 {
        let prev = if idx == 0 { 0.0 } else { self.cumulative[idx - 1] };
        (self.cumulative[idx] - prev) / self.total()
    }

    /// `None` when every count is zero.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let total = self.total();
        if total <= 0.0 {
            return None;
        }
        let x = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= x);
        Some(idx.min(self.cumulative.len() - 1))
    }
}
