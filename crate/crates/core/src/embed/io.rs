//! Binary model file and plain-text vector export.
//!
//! Binary layout (little endian): magic `ONTOEMB\0`, version `u32`, the
//! training config, `|V|`, then per token a length-prefixed UTF-8 string and
//! its `u64` count, then the input and output matrices as `f64` rows.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{EmbeddingModel, TrainingConfig, Vocabulary};
use crate::binio::{self, write_f64, write_f64s, write_str, write_u32, write_u64};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"ONTOEMB\0";
const VERSION: u32 = 1;
const MAX_DIM: u64 = 1 << 16;
const MAX_VOCAB: u64 = 1 << 32;

pub(crate) fn write_model<W: Write>(model: &EmbeddingModel, mut w: W) -> Result<()> {
    let c = &model.config;
    w.write_all(MAGIC)?;
    write_u32(&mut w, VERSION)?;
    w.write_all(&[c.sg as u8])?;
    for v in [c.size, c.min_count, c.window, c.iter, c.negative, c.workers] {
        write_u64(&mut w, v as u64)?;
    }
    write_f64(&mut w, c.alpha)?;
    write_f64(&mut w, c.sample)?;
    write_u64(&mut w, c.seed)?;
    write_u64(&mut w, model.vocab.len() as u64)?;
    for (token, count) in model.vocab.tokens().iter().zip(model.vocab.counts()) {
        write_str(&mut w, token)?;
        write_u64(&mut w, *count)?;
    }
    write_f64s(&mut w, &model.input_vectors)?;
    write_f64s(&mut w, &model.output_vectors)?;
    w.flush()?;
    Ok(())
}

pub(crate) fn read_model<R: Read>(r: R) -> Result<EmbeddingModel> {
    let mut r = binio::Reader::new(r, "embedding model");
    if &r.bytes::<8>()? != MAGIC {
        return Err(r.corrupt("bad magic number"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(r.corrupt(format!("unsupported version {version}")));
    }
    let sg = match r.u8()? {
        0 => false,
        1 => true,
        other => return Err(r.corrupt(format!("bad sg flag {other}"))),
    };
    let size = r.usize(MAX_DIM)?;
    let min_count = r.usize(u64::MAX)?;
    let window = r.usize(u64::MAX)?;
    let iter = r.usize(u64::MAX)?;
    let negative = r.usize(u64::MAX)?;
    let workers = r.usize(u64::MAX)?;
    let alpha = r.f64()?;
    let sample = r.f64()?;
    let seed = r.u64()?;
    let config = TrainingConfig {
        sg,
        size,
        min_count,
        window,
        iter,
        negative,
        alpha,
        sample,
        seed,
        workers,
    };
    let n = r.usize(MAX_VOCAB)?;
    let mut tokens = Vec::with_capacity(n.min(1 << 20));
    let mut counts = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        tokens.push(r.string()?);
        counts.push(r.u64()?);
    }
    let vocab = Vocabulary::from_parts(tokens, counts)?;
    let input_vectors = r.f64s(n * size)?;
    let output_vectors = r.f64s(n * size)?;
    r.expect_eof()?;
    Ok(EmbeddingModel {
        vocab,
        input_vectors,
        output_vectors,
        config,
    })
}

pub fn save_model(model: &EmbeddingModel, path: &Path) -> Result<()> {
    write_model(model, BufWriter::new(File::create(path)?))
}

pub fn load_model(path: &Path) -> Result<EmbeddingModel> {
    read_model(BufReader::new(File::open(path)?))
}

/// `|V| size` header, then `token f1 ... fsize` per line (input vectors).
pub fn write_text_vectors<W: Write>(model: &EmbeddingModel, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", model.len(), model.dim())?;
    for (i, token) in model.vocab.tokens().iter().enumerate() {
        w.write_all(token.as_bytes())?;
        for v in model.input_row(i) {
            write!(w, " {v}")?;
        }
        w.write_all(b"\n")?;
    }
    w.flush().map_err(Error::from)
}
