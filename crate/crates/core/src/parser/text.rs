use std::io::BufRead;

use crate::corpus::{tokenize, Corpus, Sentence, SourceTag};
use crate::error::Result;

/// One document per line, tokenized with [`tokenize`]; empty lines are
/// skipped and invalid UTF-8 is replaced rather than rejected.
pub fn read_text_corpus(text: &str) -> Corpus {
    read_text_corpus_reader(text.as_bytes()).expect("reading from memory cannot fail")
}

pub fn read_text_corpus_reader<R: BufRead>(mut reader: R) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        let line = String::from_utf8_lossy(&buf);
        if let Some(sentence) = Sentence::new(tokenize(&line)) {
            corpus.push(sentence, SourceTag::Pretrain);
        }
    }
    Ok(corpus)
}
