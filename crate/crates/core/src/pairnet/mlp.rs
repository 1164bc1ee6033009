//! Fully connected binary classifier: rectified hidden layers, logistic
//! output, mean binary cross entropy, plain mini-batch gradient descent.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::sgns::{neg_log_sigmoid, sigmoid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    /// Hidden layer widths; input is twice the embedding size, output is 1.
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: vec![800, 200],
            epochs: 100,
            batch_size: 32,
            learning_rate: 0.01,
            seed: 1,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden.iter().any(|&h| h == 0) {
            return Err(Error::InvalidConfig("hidden layer width must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be positive".into()));
        }
        Ok(())
    }

    pub fn layer_sizes(&self, input: usize) -> Vec<usize> {
        let mut sizes = vec![input];
        sizes.extend(&self.hidden);
        sizes.push(1);
        sizes
    }
}

/// Weights are `(fan_in, fan_out)` so a batch forward pass is `x · W + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Layer>,
}

impl Mlp {
    /// Glorot-uniform weights, zero biases.
    pub fn new(sizes: &[usize], rng: &mut impl Rng) -> Mlp {
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                Layer {
                    weight: Array2::from_shape_simple_fn((fan_in, fan_out), || rng.random_range(-limit..=limit)),
                    bias: Array1::zeros(fan_out),
                }
            })
            .collect();
        Mlp { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weight.nrows()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    /// Pre-activations of every layer; the last entry holds the logits.
    fn forward(&self, x: ArrayView2<f64>) -> (Vec<Array2<f64>>, Vec<Array2<f64>>) {
        let mut activations = vec![x.to_owned()];
        let mut pre = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let z = activations[i].dot(&layer.weight) + &layer.bias;
            if i + 1 < self.layers.len() {
                activations.push(z.mapv(|v| v.max(0.0)));
            }
            pre.push(z);
        }
        (activations, pre)
    }

    pub fn logits(&self, x: ArrayView2<f64>) -> Array1<f64> {
        let (_, mut pre) = self.forward(x);
        pre.pop().expect("at least one layer").column(0).to_owned()
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Array1<f64> {
        self.logits(x).mapv(sigmoid)
    }

    /// Mean cross entropy over the batch.
    pub fn loss(&self, x: ArrayView2<f64>, y: ArrayView1<f64>) -> f64 {
        let z = self.logits(x);
        bce(z.view(), y)
    }

    /// Mean cross entropy and its gradient for every layer.
    pub fn loss_and_gradients(&self, x: ArrayView2<f64>, y: ArrayView1<f64>) -> (f64, Vec<Layer>) {
        let n = x.nrows() as f64;
        let (activations, pre) = self.forward(x);
        let logits = pre.last().expect("at least one layer").column(0).to_owned();
        let loss = bce(logits.view(), y);
        let mut delta: Array2<f64> = Array2::from_shape_fn((x.nrows(), 1), |(i, _)| (sigmoid(logits[i]) - y[i]) / n);
        let mut grads = Vec::with_capacity(self.layers.len());
        for l in (0..self.layers.len()).rev() {
            let weight = activations[l].t().dot(&delta);
            let bias = delta.sum_axis(Axis(0));
            if l > 0 {
                let mut back = delta.dot(&self.layers[l].weight.t());
                back.zip_mut_with(&pre[l - 1], |d, &z| {
                    if z <= 0.0 {
                        *d = 0.0;
                    }
                });
                delta = back;
            }
            grads.push(Layer { weight, bias });
        }
        grads.reverse();
        (loss, grads)
    }

    pub fn step(&mut self, grads: &[Layer], lr: f64) {
        for (layer, g) in self.layers.iter_mut().zip(grads) {
            layer.weight.scaled_add(-lr, &g.weight);
            layer.bias.scaled_add(-lr, &g.bias);
        }
    }

    /// Trains in place and returns the mean batch loss of each epoch.
    pub fn fit(&mut self, x: ArrayView2<f64>, y: ArrayView1<f64>, config: &MlpConfig, rng: &mut impl Rng) -> Vec<f64> {
        let n = x.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        let mut losses = Vec::with_capacity(config.epochs);
        for _ in 0..config.epochs {
            order.shuffle(rng);
            let mut total = 0.0;
            let mut batches = 0;
            for chunk in order.chunks(config.batch_size) {
                let bx = x.select(Axis(0), chunk);
                let by = y.select(Axis(0), chunk);
                let (loss, grads) = self.loss_and_gradients(bx.view(), by.view());
                self.step(&grads, config.learning_rate);
                total += loss;
                batches += 1;
            }
            losses.push(if batches == 0 { 0.0 } else { total / batches as f64 });
        }
        losses
    }

    /// Sets the output layer to zero so every prediction is exactly 0.5.
    pub fn zero_output_layer(&mut self) {
        let last = self.layers.last_mut().expect("at least one layer");
        last.weight.fill(0.0);
        last.bias.fill(0.0);
    }
}

fn bce(logits: ArrayView1<f64>, y: ArrayView1<f64>) -> f64 {
    let total: f64 = logits
        .iter()
        .zip(y)
        .map(|(&z, &t)| t * neg_log_sigmoid(z) + (1.0 - t) * neg_log_sigmoid(-z))
        .sum();
    total / logits.len() as f64
}

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
