mod common;

use ontoembed::corpus::Corpus;
use ontoembed::embed::{train, train_with_report, TrainingConfig};
use ontoembed::parser::read_text_corpus;
use ontoembed::simsem::cosine;
use proptest::prelude::*;

fn small(seed: u64) -> TrainingConfig {
    TrainingConfig {
        size: 16,
        iter: 30,
        window: 2,
        seed,
        ..Default::default()
    }
}

/// X and Y appear in the same frames; Z only in disjoint ones.
fn shared_context_corpus() -> Corpus {
    let mut text = String::new();
    for i in 0..40 {
        let w = if i % 2 == 0 { "x" } else { "y" };
        text.push_str(&format!("alpha beta {w} gamma delta\n"));
        text.push_str(&format!("epsilon {w} zeta\n"));
        text.push_str("kappa lambda z mu nu\n");
        text.push_str("omicron z pi\n");
    }
    read_text_corpus(&text)
}

/// Sentences of 6-12 words drawn from one of three 25-word topics.
fn topic_corpus(seed: u64, n: usize) -> Corpus {
    use rand::Rng;
    let mut r = common::rng(seed);
    let mut text = String::new();
    for _ in 0..n {
        let topic = r.random_range(0..3);
        let len = r.random_range(6..=12);
        let words: Vec<String> = (0..len).map(|_| format!("t{topic}w{}", r.random_range(0..25))).collect();
        text.push_str(&words.join(" "));
        text.push('\n');
    }
    read_text_corpus(&text)
}

#[test]
fn gradients_match_finite_differences() {
    let (input, output) = common::sgns_gradient_check(11, 200);
    assert!(input < 1e-4, "input gradient relative error {input}");
    assert!(output < 1e-4, "output gradient relative error {output}");
}

#[test]
fn epoch_loss_is_non_increasing_within_tolerance() {
    let cfg = TrainingConfig { iter: 10, ..small(3) };
    let (_, report) = train_with_report(&topic_corpus(7, 800), &cfg, None).unwrap();
    let l = &report.epoch_losses;
    assert!(l.last().unwrap() < &l[0]);
    for w in l.windows(2) {
        assert!(w[1] <= w[0] * 1.05, "loss went from {} to {}", w[0], w[1]);
    }
}

#[test]
fn shared_contexts_give_similar_vectors() {
    for seed in 1..=5 {
        let m = train(&shared_context_corpus(), &small(seed), None).unwrap();
        let v = |t| m.vector_of(t).unwrap();
        let xy = cosine(v("x"), v("y")).unwrap();
        let xz = cosine(v("x"), v("z")).unwrap();
        assert!(xy > xz, "seed {seed}: cos(x,y)={xy} cos(x,z)={xz}");
    }
}

#[test]
fn continuation_leaves_absent_tokens_untouched() {
    let init = train(&shared_context_corpus(), &small(1), None).unwrap();
    let cont = read_text_corpus("x new words here y\nalpha new beta words\n");
    let model = train(&cont, &small(2), Some(&init)).unwrap();
    for token in ["z", "kappa", "lambda", "omicron", "pi"] {
        let before = init.vocab.get(token).unwrap();
        let after = model.vocab.get(token).unwrap();
        assert_eq!(before, after);
        let same = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(p, q)| p.to_bits() == q.to_bits());
        assert!(same(init.input_row(before), model.input_row(after)), "{token} input moved");
        assert!(same(init.output_row(before), model.output_row(after)), "{token} output moved");
    }
    assert_ne!(init.vector_of("x").unwrap(), model.vector_of("x").unwrap());
    assert!(model.vector_of("new").is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn single_worker_training_is_bit_reproducible(seed in any::<u64>()) {
        let corpus = shared_context_corpus();
        let cfg = TrainingConfig { iter: 3, ..small(seed) };
        let a = train(&corpus, &cfg, None).unwrap();
        let b = train(&corpus, &cfg, None).unwrap();
        prop_assert_eq!(a, b);
    }
}
