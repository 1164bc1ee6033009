//! ROC curves, AUC and per-method comparison reports.
//!
//! AUC is computed from integer true/false-positive counts so that the
//! trapezoid sum is exactly the Mann–Whitney statistic with half credit for
//! ties, up to one final floating-point division.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iri::Iri;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn tpr(&self) -> f64 {
        self.tp as f64 / (self.tp + self.fn_) as f64
    }

    pub fn fpr(&self) -> f64 {
        self.fp as f64 / (self.fp + self.tn) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocResult {
    /// `(fpr, tpr)` from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    /// Score at which each point is reached; the first is `+inf`.
    pub thresholds: Vec<f64>,
    pub counts: Vec<ConfusionCounts>,
    pub auc: f64,
}

impl RocResult {
    pub fn n_pos(&self) -> u64 {
        self.counts.last().map_or(0, |c| c.tp + c.fn_)
    }

    pub fn n_neg(&self) -> u64 {
        self.counts.last().map_or(0, |c| c.fp + c.tn)
    }

    /// `threshold,fpr,tpr` with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "threshold,fpr,tpr")?;
        for (t, (fpr, tpr)) in self.thresholds.iter().zip(&self.points) {
            writeln!(w, "{t},{fpr},{tpr}")?;
        }
        Ok(())
    }
}

fn check(scored: &[(f64, bool)]) -> Result<(u64, u64)> {
    if let Some(&(s, _)) = scored.iter().find(|(s, _)| s.is_nan()) {
        return Err(Error::InvalidScore(s));
    }
    let pos = scored.iter().filter(|(_, l)| *l).count() as u64;
    let neg = scored.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateLabels);
    }
    Ok((pos, neg))
}

fn sorted_desc(scored: &[(f64, bool)]) -> Vec<(f64, bool)> {
    let mut v = scored.to_vec();
    v.sort_by(|a, b| b.0.total_cmp(&a.0));
    v
}

/// Cumulative `(tp, fp, threshold)` after each group of tied scores.
fn steps(sorted: &[(f64, bool)]) -> Vec<(u64, u64, f64)> {
    let mut out = Vec::new();
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < sorted.len() {
        let score = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == score {
            if sorted[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        out.push((tp, fp, score));
    }
    out
}

fn trapezoid(steps: &[(u64, u64, f64)], pos: u64, neg: u64) -> f64 {
    let (mut prev_tp, mut prev_fp) = (0u128, 0u128);
    let mut twice_area = 0u128;
    for &(tp, fp, _) in steps {
        let (tp, fp) = (tp as u128, fp as u128);
        twice_area += (fp - prev_fp) * (tp + prev_tp);
        prev_tp = tp;
        prev_fp = fp;
    }
    twice_area as f64 / (2 * pos as u128 * neg as u128) as f64
}

pub fn roc_curve(scored: &[(f64, bool)]) -> Result<RocResult> {
    let (pos, neg) = check(scored)?;
    let steps = steps(&sorted_desc(scored));
    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = vec![f64::INFINITY];
    let mut counts = vec![ConfusionCounts {
        tp: 0,
        fp: 0,
        tn: neg,
        fn_: pos,
    }];
    for &(tp, fp, score) in &steps {
        let c = ConfusionCounts {
            tp,
            fp,
            tn: neg - fp,
            fn_: pos - tp,
        };
        points.push((c.fpr(), c.tpr()));
        thresholds.push(score);
        counts.push(c);
    }
    Ok(RocResult {
        points,
        thresholds,
        counts,
        auc: trapezoid(&steps, pos, neg),
    })
}

pub fn auc_only(scored: &[(f64, bool)]) -> Result<f64> {
    let (pos, neg) = check(scored)?;
    Ok(trapezoid(&steps(&sorted_desc(scored)), pos, neg))
}

/// One evaluated pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub a: Iri,
    pub b: Iri,
    pub label: bool,
    pub score: f64,
}

impl ScoredPair {
    fn key(&self) -> (&Iri, &Iri, bool) {
        (&self.a, &self.b, self.label)
    }
}

fn as_scored(pairs: &[ScoredPair]) -> Vec<(f64, bool)> {
    pairs.iter().map(|p| (p.score, p.label)).collect()
}

/// `entity_a entity_b label score`, tab separated.
pub fn write_scored_pairs<W: Write>(pairs: &[ScoredPair], mut w: W) -> io::Result<()> {
    for p in pairs {
        writeln!(w, "{}\t{}\t{}\t{}", p.a, p.b, p.label as u8, p.score)?;
    }
    Ok(())
}

pub fn read_scored_pairs<R: BufRead>(r: R) -> Result<Vec<ScoredPair>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Format(format!("scored pairs line {}: expected 4 tab-separated fields", i + 1));
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 {
            return Err(bad());
        }
        let label = match f[2] {
            "0" => false,
            "1" => true,
            _ => return Err(bad()),
        };
        out.push(ScoredPair {
            a: Iri::new(f[0])?,
            b: Iri::new(f[1])?,
            label,
            score: f[3].parse().map_err(|_| bad())?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodAuc {
    pub method: String,
    pub auc: f64,
    pub n_pos: u64,
    pub n_neg: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Sorted by descending AUC, ties by method name.
    pub rows: Vec<MethodAuc>,
    pub curves: BTreeMap<String, RocResult>,
}

impl Report {
    pub fn write_summary<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "method\tauc\tn_pos\tn_neg")?;
        for r in &self.rows {
            writeln!(w, "{}\t{}\t{}\t{}", r.method, r.auc, r.n_pos, r.n_neg)?;
        }
        Ok(())
    }
}

/// Every run must score the same multiset of labeled pairs, in any order.
pub fn compare_methods(runs: &[(String, Vec<ScoredPair>)]) -> Result<Report> {
    let mut reference: Option<(&str, Vec<(&Iri, &Iri, bool)>)> = None;
    let mut rows = Vec::new();
    let mut curves = BTreeMap::new();
    for (name, pairs) in runs {
        let mut keys: Vec<_> = pairs.iter().map(ScoredPair::key).collect();
        keys.sort();
        match &reference {
            None => reference = Some((name, keys)),
            Some((first, expected)) => {
                if *expected != keys {
                    return Err(Error::PairSetMismatch(format!("{name} vs {first}")));
                }
            }
        }
        let roc = roc_curve(&as_scored(pairs))?;
        rows.push(MethodAuc {
            method: name.clone(),
            auc: roc.auc,
            n_pos: roc.n_pos(),
            n_neg: roc.n_neg(),
        });
        curves.insert(name.clone(), roc);
    }
    rows.sort_by(|a, b| b.auc.total_cmp(&a.auc).then_with(|| a.method.cmp(&b.method)));
    Ok(Report { rows, curves })
}
