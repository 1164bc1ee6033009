//! End-to-end acceptance checks. Runs as a plain binary (no libtest
//! harness) and prints one PASS/FAIL line per criterion; exits non-zero if
//! any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{mann_whitney, naive_saturate, random_annotated_dag, random_ontology, random_scored_set, rng};
use ontoembed::embed::load_model;
use ontoembed::eval::{auc_only, roc_curve};
use ontoembed::pipeline::{self, PipelineConfig, ABLATION_DEFAULT};
use ontoembed::reasoner::saturate;
use ontoembed::simsem::{information_content, resnik, resnik_bma};
use ontoembed::synthetic::{generate, pipeline_config, SyntheticConfig};
use rand::Rng;

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn reasoner_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let mut matched = 0;
    for _ in 0..100 {
        let n = r.random_range(1..=50);
        let m = r.random_range(0..=120);
        let kb = random_ontology(&mut r, n, m);
        let closure = saturate(&kb);
        let oracle = naive_saturate(&kb);
        let inferred: BTreeSet<_> = closure.inferred_axioms.iter().cloned().collect();
        if closure.subsumptions == oracle.subsumptions
            && inferred == oracle.inferred
            && inferred.len() == closure.inferred_axioms.len()
        {
            matched += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        matched == 100 && t < Duration::from_secs(10),
        format!("{matched}/100 ontologies equal the naive fixpoint ({})", secs(t)),
    )
}

fn resnik_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(202);
    let mut worst = 0.0f64;
    let mut comparisons = 0usize;
    for _ in 0..50 {
        let n = r.random_range(1..=30);
        let m = r.random_range(1..=20);
        let dag = random_annotated_dag(&mut r, n, m);
        let oracle = dag.oracle();
        let closure = saturate(&dag.kb);
        let stats = information_content(&closure, &dag.entities).unwrap();
        for c1 in 0..n {
            for c2 in 0..n {
                let got = resnik(&stats, &closure, &common::class(c1), &common::class(c2)).unwrap();
                worst = worst.max((got - oracle.resnik(c1, c2)).abs());
                comparisons += 1;
            }
        }
        for e1 in &dag.entities {
            for e2 in &dag.entities {
                let got = resnik_bma(&stats, &closure, e1, e2).unwrap();
                worst = worst.max((got - oracle.bma(e1, e2)).abs());
                comparisons += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && t < Duration::from_secs(5),
        format!("{comparisons} resnik/bma values, max |diff| {worst:.1e} ({})", secs(t)),
    )
}

fn gradient_checks() -> Outcome {
    let start = Instant::now();
    let (sg_in, sg_out) = common::sgns_gradient_check(303, 150);
    let mlp = common::mlp_gradient_check(304, &[400, 800, 200, 1], 150);
    let t = start.elapsed();
    let worst = sg_in.max(sg_out).max(mlp);
    outcome(
        worst < 1e-4 && t < Duration::from_secs(30),
        format!(
            "150+150 skip-gram probes (max rel {:.1e}), 150 MLP probes on 400-800-200-1 (max rel {mlp:.1e}) ({})",
            sg_in.max(sg_out),
            secs(t)
        ),
    )
}

fn auc_correctness() -> Outcome {
    let mut r = rng(404);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let set = random_scored_set(&mut r, 200);
        worst = worst.max((roc_curve(&set).unwrap().auc - mann_whitney(&set)).abs());
    }
    let perfect = [(0.9, true), (0.7, true), (0.4, false), (0.1, false)];
    let reversed: Vec<(f64, bool)> = perfect.iter().map(|&(s, l)| (s, !l)).collect();
    let p = auc_only(&perfect).unwrap();
    let q = auc_only(&reversed).unwrap();
    outcome(
        worst <= 1e-12 && p == 1.0 && q == 0.0,
        format!("1000 sets, max |trapezoid - mann-whitney| {worst:.1e}; perfect {p}, reversed {q}"),
    )
}

/// Writes synthetic data for `seed` into `dir` and returns its config with
/// `extra` lines appended.
fn synthetic_config(dir: &Path, seed: u64, extra: &str) -> PipelineConfig {
    if !dir.join("ontology.ofn").exists() {
        let data = generate(&SyntheticConfig {
            seed,
            ..Default::default()
        });
        data.write_files(dir).unwrap();
    }
    PipelineConfig::parse(&format!("{}{extra}", pipeline_config(seed)), dir).unwrap()
}

fn auc_of(report: &ontoembed::eval::Report, method: &str) -> f64 {
    report.rows.iter().find(|r| r.method == method).unwrap().auc
}

struct SeedRun {
    opa_cosine: f64,
    onto_cosine: f64,
    mlp: f64,
    no_pretrain: f64,
    opa_time: Duration,
    transfer_ok: bool,
}

fn run_seed(root: &Path, seed: u64) -> SeedRun {
    let dir = root.join(format!("seed{seed}"));
    let opa = synthetic_config(&dir, seed, "output = opa\n");
    let start = Instant::now();
    let report = pipeline::cmd_all(&opa).unwrap().unwrap();
    let opa_time = start.elapsed();

    let onto = synthetic_config(&dir, seed, "output = onto\nannotation_properties = none\nclassifier = false\n");
    let onto_report = pipeline::cmd_all(&onto).unwrap().unwrap();

    let mut plain = synthetic_config(&dir, seed, "output = plain\nclassifier = false\n");
    plain.pretrain_corpus = None;
    let plain_report = pipeline::cmd_all(&plain).unwrap().unwrap();

    SeedRun {
        opa_cosine: auc_of(&report, "cosine"),
        onto_cosine: auc_of(&onto_report, "cosine"),
        mlp: auc_of(&report, "mlp"),
        no_pretrain: auc_of(&plain_report, "cosine"),
        opa_time,
        transfer_ok: absent_tokens_untouched(&opa.output),
    }
}

/// Pre-trained tokens that never occur in the ontology corpus keep their
/// exact vectors in the continued model.
fn absent_tokens_untouched(out: &Path) -> bool {
    let pre = load_model(&out.join(pipeline::PRETRAIN_MODEL_FILE)).unwrap();
    let fin = load_model(&out.join(pipeline::MODEL_FILE)).unwrap();
    let corpus = fs::read_to_string(out.join(pipeline::CORPUS_FILE)).unwrap();
    let seen: BTreeSet<&str> = corpus.split_whitespace().collect();
    let mut checked = 0;
    for (i, token) in pre.vocab.tokens().iter().enumerate() {
        if seen.contains(token.as_str()) {
            continue;
        }
        let Some(j) = fin.vocab.get(token) else { return false };
        let same = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits());
        if !same(pre.input_row(i), fin.input_row(j)) || !same(pre.output_row(i), fin.output_row(j)) {
            return false;
        }
        checked += 1;
    }
    checked > 0
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism(root: &Path) -> Outcome {
    let dir = root.join("determinism");
    let mut snaps = Vec::new();
    for run in 0..3 {
        let cfg = synthetic_config(&dir, 7, &format!("output = run{run}\n"));
        pipeline::cmd_all(&cfg).unwrap();
        snaps.push(snapshot(&cfg.output));
    }
    let files = snaps[0].len();
    let identical = snaps.iter().all(|s| *s == snaps[0]);
    outcome(
        identical && files > 0,
        format!("3 runs of the full pipeline, {files} artifacts each, byte-identical: {identical}"),
    )
}

fn ablation(root: &Path) -> Outcome {
    let props: Vec<String> = ABLATION_DEFAULT.iter().map(|s| s.to_string()).collect();
    let mut ok_runs = 0;
    let mut shapes_ok = true;
    let mut lines = Vec::new();
    for seed in SEEDS {
        let dir = root.join(format!("seed{seed}"));
        let cfg = synthetic_config(&dir, seed, "output = ablation\nclassifier = false\n");
        let rows = pipeline::cmd_ablate(&cfg, &props).unwrap();
        let auc: BTreeMap<&str, f64> = rows.iter().map(|r| (r.property.as_str(), r.auc)).collect();
        shapes_ok &= rows.len() == 6 && ABLATION_DEFAULT.iter().all(|p| auc.contains_key(p));
        let table = fs::read_to_string(cfg.output.join(pipeline::ABLATION_FILE)).unwrap();
        shapes_ok &= table.lines().count() == 7;
        let label = auc["label"];
        let holds = auc["creation_date"] <= label && auc["namespace"] <= label;
        ok_runs += holds as usize;
        lines.push(format!(
            "seed {seed}: label {label:.3} creation_date {:.3} namespace {:.3}",
            auc["creation_date"], auc["namespace"]
        ));
    }
    for l in &lines {
        println!("        {l}");
    }
    outcome(
        shapes_ok && ok_runs >= 4,
        format!("six rows per run; creation_date, namespace <= label in {ok_runs}/5 seeds"),
    )
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let report = |name: &'static str, o: Outcome, results: &mut Vec<(&str, Outcome)>| {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o));
    };

    report("1 reasoner oracle", reasoner_oracle(), &mut results);
    report("2 resnik/bma oracle", resnik_oracle(), &mut results);
    report("3 gradient checks", gradient_checks(), &mut results);
    report("4 auc correctness", auc_correctness(), &mut results);

    let runs: Vec<SeedRun> = SEEDS.iter().map(|&s| run_seed(root, s)).collect();
    for (seed, r) in SEEDS.iter().zip(&runs) {
        println!(
            "        seed {seed}: annotated cosine {:.3}, axioms-only cosine {:.3}, mlp {:.3}, no pretrain {:.3}, run {}",
            r.opa_cosine,
            r.onto_cosine,
            r.mlp,
            r.no_pretrain,
            secs(r.opa_time)
        );
    }
    let both = runs
        .iter()
        .filter(|r| r.opa_cosine > r.onto_cosine && r.mlp >= r.opa_cosine)
        .count();
    let slowest = runs.iter().map(|r| r.opa_time).max().unwrap();
    report(
        "5 synthetic ordering",
        outcome(
            both >= 4 && slowest < Duration::from_secs(60),
            format!(
                "annotated cosine > axioms-only cosine and mlp >= annotated cosine in {both}/5 seeds; slowest run {}",
                secs(slowest)
            ),
        ),
        &mut results,
    );

    let transfer = runs.iter().filter(|r| r.opa_cosine >= r.no_pretrain).count();
    let untouched = runs.iter().all(|r| r.transfer_ok);
    report(
        "6 transfer learning",
        outcome(
            transfer >= 4 && untouched,
            format!("with pretrain >= without in {transfer}/5 seeds; absent tokens bit-identical: {untouched}"),
        ),
        &mut results,
    );

    report("7 determinism", determinism(root), &mut results);
    report("8 ablation", ablation(root), &mut results);

    let failed: Vec<&str> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
