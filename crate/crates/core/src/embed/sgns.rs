//! Skip-gram negative-sampling objective for one center word.
//!
//! For input vector `v` of the center word, output vector `u_c` of the true
//! context and output vectors `u_n` of the noise words, the loss minimized is
//!
//! ```text
//! L = -log σ(u_c · v) - Σ_n log σ(-u_n · v)
//! ```

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `-log σ(x)`, stable for large `|x|`.
pub fn neg_log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Loss for one center vector against `outputs` (rows of length `dim`, packed);
/// `labels[k]` is `true` for the context word and `false` for noise words.
pub fn loss(input: &[f64], outputs: &[f64], labels: &[bool]) -> f64 {
    let dim = input.len();
    labels
        .iter()
        .enumerate()
        .map(|(k, &positive)| {
            let score = dot(input, &outputs[k * dim..(k + 1) * dim]);
            neg_log_sigmoid(if positive { score } else { -score })
        })
        .sum()
}

/// Returns the loss and writes `∂L/∂v` into `grad_input` and `∂L/∂u_k` into
/// the packed `grad_outputs`. Both buffers are overwritten.
pub fn loss_and_gradients(
    input: &[f64],
    outputs: &[f64],
    labels: &[bool],
    grad_input: &mut [f64],
    grad_outputs: &mut [f64],
) -> f64 {
    let dim = input.len();
    grad_input.fill(0.0);
    let mut total = 0.0;
    for (k, &positive) in labels.iter().enumerate() {
        let row = &outputs[k * dim..(k + 1) * dim];
        let score = dot(input, row);
        let target = if positive { 1.0 } else { 0.0 };
        total += neg_log_sigmoid(if positive { score } else { -score });
        // d/ds of -log σ(s) is σ(s) - 1; of -log σ(-s) is σ(s)
        let g = sigmoid(score) - target;
        for d in 0..dim {
            grad_input[d] += g * row[d];
            grad_outputs[k * dim + d] = g * input[d];
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_extremes() {
        assert!((sigmoid(0.0) - 0.5).abs() < 1e-15);
        assert!(neg_log_sigmoid(800.0) >= 0.0);
        assert!((neg_log_sigmoid(-800.0) - 800.0).abs() < 1e-9);
        assert!(sigmoid(-800.0) >= 0.0);
    }

    #[test]
    fn zero_vectors_give_log2_per_term() {
        let input = [0.0; 3];
        let outputs = [0.0; 9];
        let l = loss(&input, &outputs, &[true, false, false]);
        assert!((l - 3.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }
}
