use std::collections::{BTreeSet, HashSet};
use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iri::Iri;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Split {
    Train,
    Test,
}

/// How pairs are assigned to train/test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitMode {
    /// Entities are partitioned; pairs that straddle the partition are dropped.
    ByEntity,
    /// Pairs are partitioned directly; entities may appear on both sides.
    ByPair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub a: Iri,
    pub b: Iri,
    pub label: bool,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PairDataset {
    pub pairs: Vec<LabeledPair>,
}

/// Orders an unordered pair.
pub fn canonical(a: Iri, b: Iri) -> (Iri, Iri) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl PairDataset {
    pub fn split(&self, split: Split) -> impl Iterator<Item = &LabeledPair> {
        self.pairs.iter().filter(move |p| p.split == split)
    }

    pub fn count(&self, split: Split, label: bool) -> usize {
        self.split(split).filter(|p| p.label == label).count()
    }

    pub fn entities(&self, split: Split) -> BTreeSet<&Iri> {
        self.split(split).flat_map(|p| [&p.a, &p.b]).collect()
    }

    /// `entity_a entity_b label split`, tab separated.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for p in &self.pairs {
            let split = match p.split {
                Split::Train => "train",
                Split::Test => "test",
            };
            writeln!(w, "{}\t{}\t{}\t{split}", p.a, p.b, p.label as u8)?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(r: R) -> Result<PairDataset> {
        let mut pairs = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::Format(format!("dataset line {}: expected `a b 0|1 train|test`", i + 1));
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(bad());
            }
            let label = match f[2] {
                "0" => false,
                "1" => true,
                _ => return Err(bad()),
            };
            let split = match f[3] {
                "train" => Split::Train,
                "test" => Split::Test,
                _ => return Err(bad()),
            };
            pairs.push(LabeledPair {
                a: Iri::new(f[0])?,
                b: Iri::new(f[1])?,
                label,
                split,
            });
        }
        Ok(PairDataset { pairs })
    }
}

/// Draws `n` distinct unordered non-self pairs over `entities` that are not in
/// `excluded`.
fn sample_negatives(
    entities: &[Iri],
    excluded: &HashSet<(Iri, Iri)>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(Iri, Iri)>> {
    let k = entities.len();
    let total = k * k.saturating_sub(1) / 2;
    let blocked = excluded
        .iter()
        .filter(|(a, b)| entities.binary_search(a).is_ok() && entities.binary_search(b).is_ok())
        .count();
    let available = total - blocked;
    if n > available {
        return Err(Error::CannotBalance { needed: n, available });
    }
    if n * 2 <= available {
        let mut chosen = HashSet::new();
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let i = rng.random_range(0..k);
            let j = rng.random_range(0..k);
            if i == j {
                continue;
            }
            let pair = canonical(entities[i].clone(), entities[j].clone());
            if excluded.contains(&pair) || !chosen.insert(pair.clone()) {
                continue;
            }
            out.push(pair);
        }
        return Ok(out);
    }
    let mut all = Vec::with_capacity(available);
    for i in 0..k {
        for j in i + 1..k {
            let pair = (entities[i].clone(), entities[j].clone());
            if !excluded.contains(&pair) {
                all.push(pair);
            }
        }
    }
    let (picked, _) = all.partial_shuffle(rng, n);
    Ok(picked.to_vec())
}

fn push_split(out: &mut Vec<LabeledPair>, pairs: Vec<(Iri, Iri)>, label: bool, split: Split) {
    out.extend(pairs.into_iter().map(|(a, b)| LabeledPair { a, b, label, split }));
}

/// Builds a balanced dataset from positive pairs over `universe`.
///
/// Pairs are unordered; self-pairs and duplicates among the positives are
/// dropped. Negatives are drawn uniformly without replacement from the
/// remaining unordered pairs of the relevant entity set.
pub fn build_pair_dataset(
    positives: &[(Iri, Iri)],
    universe: &[Iri],
    seed: u64,
    test_fraction: f64,
    mode: SplitMode,
) -> Result<PairDataset> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::InvalidConfig(format!(
            "test_fraction must be in [0, 1), got {test_fraction}"
        )));
    }
    let entities: Vec<Iri> = universe.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let mut pos: Vec<(Iri, Iri)> = positives
        .iter()
        .filter(|(a, b)| a != b)
        .map(|(a, b)| canonical(a.clone(), b.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if let Some((a, b)) = pos
        .iter()
        .find(|(a, b)| entities.binary_search(a).is_err() || entities.binary_search(b).is_err())
    {
        return Err(Error::InvalidConfig(format!("positive pair ({a}, {b}) outside the entity universe")));
    }
    let excluded: HashSet<(Iri, Iri)> = pos.iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    match mode {
        SplitMode::ByPair => {
            pos.shuffle(&mut rng);
            let n_test = (pos.len() as f64 * test_fraction).round() as usize;
            let negatives = sample_negatives(&entities, &excluded, pos.len(), &mut rng)?;
            let train_pos = pos.split_off(n_test);
            let mut train_neg = negatives;
            let test_neg: Vec<_> = train_neg.drain(..n_test).collect();
            push_split(&mut pairs, train_pos, true, Split::Train);
            push_split(&mut pairs, train_neg, false, Split::Train);
            push_split(&mut pairs, pos, true, Split::Test);
            push_split(&mut pairs, test_neg, false, Split::Test);
        }
        SplitMode::ByEntity => {
            let mut shuffled = entities.clone();
            shuffled.shuffle(&mut rng);
            let n_test = (shuffled.len() as f64 * test_fraction).round() as usize;
            let mut test_entities = shuffled[..n_test].to_vec();
            let mut train_entities = shuffled[n_test..].to_vec();
            test_entities.sort();
            train_entities.sort();
            for (split, side) in [(Split::Train, &train_entities), (Split::Test, &test_entities)] {
                let inside = |e: &Iri| side.binary_search(e).is_ok();
                let side_pos: Vec<_> = pos.iter().filter(|(a, b)| inside(a) && inside(b)).cloned().collect();
                let negatives = sample_negatives(side, &excluded, side_pos.len(), &mut rng)?;
                push_split(&mut pairs, side_pos, true, split);
                push_split(&mut pairs, negatives, false, split);
            }
        }
    }
    Ok(PairDataset { pairs })
}
