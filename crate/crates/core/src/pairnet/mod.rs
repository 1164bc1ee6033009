//! Balanced pair datasets and a feed-forward pair classifier over
//! concatenated entity embeddings.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2, Axis};

use crate::binio::{self, write_f64, write_f64s, write_u32, write_u64};
use crate::embed::EmbeddingModel;
use crate::error::{Error, Result};
use crate::eval::ScoredPair;
use crate::iri::Iri;

mod dataset;
mod mlp;

pub use dataset::{build_pair_dataset, canonical, LabeledPair, PairDataset, Split, SplitMode};
pub use mlp::{Layer, Mlp, MlpConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct PairClassifier {
    pub mlp: Mlp,
    pub config: MlpConfig,
    pub scaler: FeatureScaler,
}

/// Per-feature standardisation fitted on the training rows. Raw embedding
/// components are small relative to the Glorot range, which leaves plain SGD
/// almost stationary for the default schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaler {
    pub mean: Array1<f64>,
    pub scale: Array1<f64>,
}

impl FeatureScaler {
    pub fn identity(dim: usize) -> FeatureScaler {
        FeatureScaler {
            mean: Array1::zeros(dim),
            scale: Array1::ones(dim),
        }
    }

    /// Constant columns keep a scale of 1.
    pub fn fit(x: &Array2<f64>) -> FeatureScaler {
        let Some(mean) = x.mean_axis(Axis(0)) else {
            return FeatureScaler::identity(x.ncols());
        };
        let scale = x
            .std_axis(Axis(0), 0.0)
            .mapv(|s| if s > 1e-12 { s } else { 1.0 });
        FeatureScaler { mean, scale }
    }

    pub fn apply(&self, mut x: Array2<f64>) -> Array2<f64> {
        x -= &self.mean;
        x /= &self.scale;
        x
    }
}

/// `concat(v_a, v_b)` for each pair, one row per pair.
pub fn pair_features<'a>(
    model: &EmbeddingModel,
    pairs: impl IntoIterator<Item = (&'a Iri, &'a Iri)>,
) -> Result<Array2<f64>> {
    let d = model.dim();
    let mut data = Vec::new();
    let mut rows = 0;
    for (a, b) in pairs {
        data.extend_from_slice(model.vector_of(a.as_str())?);
        data.extend_from_slice(model.vector_of(b.as_str())?);
        rows += 1;
    }
    Ok(Array2::from_shape_vec((rows, 2 * d), data).expect("rows have length 2d"))
}

pub fn train_mlp(ds: &PairDataset, model: &EmbeddingModel, config: &MlpConfig) -> Result<PairClassifier> {
    train_mlp_with_losses(ds, model, config).map(|(clf, _)| clf)
}

/// Trains on the `Train` split; also returns the mean loss of each epoch.
pub fn train_mlp_with_losses(
    ds: &PairDataset,
    model: &EmbeddingModel,
    config: &MlpConfig,
) -> Result<(PairClassifier, Vec<f64>)> {
    config.validate()?;
    let train: Vec<&LabeledPair> = ds.split(Split::Train).collect();
    let raw = pair_features(model, train.iter().map(|p| (&p.a, &p.b)))?;
    let scaler = FeatureScaler::fit(&raw);
    let x = scaler.apply(raw);
    let y = Array1::from_iter(train.iter().map(|p| p.label as u8 as f64));
    let mut rng = mlp::seeded_rng(config.seed);
    let mut net = Mlp::new(&config.layer_sizes(2 * model.dim()), &mut rng);
    let losses = net.fit(x.view(), y.view(), config, &mut rng);
    Ok((
        PairClassifier {
            mlp: net,
            config: config.clone(),
            scaler,
        },
        losses,
    ))
}

impl PairClassifier {
    pub fn score(&self, model: &EmbeddingModel, a: &Iri, b: &Iri) -> Result<f64> {
        let x = self.features(model, [(a, b)])?;
        Ok(self.mlp.predict(x.view())[0])
    }

    /// Scaled features, checked against the network's input width.
    fn features<'a>(
        &self,
        model: &EmbeddingModel,
        pairs: impl IntoIterator<Item = (&'a Iri, &'a Iri)>,
    ) -> Result<Array2<f64>> {
        let x = pair_features(model, pairs)?;
        if x.ncols() != self.mlp.input_dim() {
            return Err(Error::DimMismatch(x.ncols(), self.mlp.input_dim()));
        }
        Ok(self.scaler.apply(x))
    }
}

/// Scores labeled pairs. With `symmetric`, the score is the mean of both
/// argument orders.
pub fn score_pairs(
    clf: &PairClassifier,
    pairs: &[LabeledPair],
    model: &EmbeddingModel,
    symmetric: bool,
) -> Result<Vec<ScoredPair>> {
    let forward = clf.features(model, pairs.iter().map(|p| (&p.a, &p.b)))?;
    let mut scores = clf.mlp.predict(forward.view());
    if symmetric {
        let backward = clf.features(model, pairs.iter().map(|p| (&p.b, &p.a)))?;
        scores = (scores + clf.mlp.predict(backward.view())) * 0.5;
    }
    Ok(pairs
        .iter()
        .zip(scores)
        .map(|(p, score)| ScoredPair {
            a: p.a.clone(),
            b: p.b.clone(),
            label: p.label,
            score,
        })
        .collect())
}

const MAGIC: &[u8; 8] = b"ONTOMLP\0";
const VERSION: u32 = 1;

pub fn write_classifier<W: Write>(clf: &PairClassifier, mut w: W) -> Result<()> {
    let c = &clf.config;
    w.write_all(MAGIC)?;
    write_u32(&mut w, VERSION)?;
    write_u64(&mut w, c.epochs as u64)?;
    write_u64(&mut w, c.batch_size as u64)?;
    write_f64(&mut w, c.learning_rate)?;
    write_u64(&mut w, c.seed)?;
    write_u64(&mut w, clf.mlp.layers.len() as u64)?;
    for layer in &clf.mlp.layers {
        write_u64(&mut w, layer.weight.nrows() as u64)?;
        write_u64(&mut w, layer.weight.ncols() as u64)?;
        write_f64s(&mut w, layer.weight.as_standard_layout().as_slice().expect("standard layout"))?;
        write_f64s(&mut w, layer.bias.as_slice().expect("contiguous"))?;
    }
    write_f64s(&mut w, clf.scaler.mean.as_slice().expect("contiguous"))?;
    write_f64s(&mut w, clf.scaler.scale.as_slice().expect("contiguous"))?;
    w.flush()?;
    Ok(())
}

pub fn read_classifier<R: Read>(r: R) -> Result<PairClassifier> {
    const MAX_WIDTH: u64 = 1 << 16;
    let mut r = binio::Reader::new(r, "classifier");
    if &r.bytes::<8>()? != MAGIC {
        return Err(r.corrupt("bad magic number"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(r.corrupt(format!("unsupported version {version}")));
    }
    let epochs = r.usize(u64::MAX)?;
    let batch_size = r.usize(u64::MAX)?;
    let learning_rate = r.f64()?;
    let seed = r.u64()?;
    let n_layers = r.usize(64)?;
    let mut layers: Vec<Layer> = Vec::with_capacity(n_layers);
    for i in 0..n_layers {
        let rows = r.usize(MAX_WIDTH)?;
        let cols = r.usize(MAX_WIDTH)?;
        if let Some(prev) = layers.last() {
            if prev.weight.ncols() != rows {
                return Err(r.corrupt(format!("layer {i} input width {rows} does not match previous output")));
            }
        }
        let weight = Array2::from_shape_vec((rows, cols), r.f64s(rows * cols)?).expect("sized above");
        let bias = Array1::from(r.f64s(cols)?);
        layers.push(Layer { weight, bias });
    }
    if layers.last().is_none_or(|l| l.weight.ncols() != 1) {
        return Err(Error::Format("classifier: output layer must have width 1".into()));
    }
    let dim = layers[0].weight.nrows();
    let scaler = FeatureScaler {
        mean: Array1::from(r.f64s(dim)?),
        scale: Array1::from(r.f64s(dim)?),
    };
    r.expect_eof()?;
    let hidden = layers[..layers.len() - 1].iter().map(|l| l.weight.ncols()).collect();
    Ok(PairClassifier {
        mlp: Mlp { layers },
        config: MlpConfig {
            hidden,
            epochs,
            batch_size,
            learning_rate,
            seed,
        },
        scaler,
    })
}

pub fn save_classifier(clf: &PairClassifier, path: &Path) -> Result<()> {
    write_classifier(clf, BufWriter::new(File::create(path)?))
}

pub fn load_classifier(path: &Path) -> Result<PairClassifier> {
    read_classifier(BufReader::new(File::open(path)?))
}
