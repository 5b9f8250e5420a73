#![allow(dead_code)]

pub mod fixtures;
pub mod oracles;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use srirnn_core::model::{LstmWeights, ReadoutKind, RnnModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

/// Random LSTM with weights uniform in `+-scale / sqrt(hidden)`.
pub fn random_model(rng: &mut ChaCha8Rng, hidden: usize, inputs: usize, scale: f64) -> RnnModel {
    let s = scale / (hidden as f64).sqrt();
    RnnModel::new(LstmWeights {
        hidden_size: hidden,
        input_size: inputs,
        w_ih: uniform(rng, 4 * hidden * inputs, s),
        w_hh: uniform(rng, 4 * hidden * hidden, s),
        bias: uniform(rng, 4 * hidden, s),
        out_w: uniform(rng, hidden, s),
        out_b: rng.random_range(-0.1..0.1),
        readout: if rng.random_bool(0.5) { ReadoutKind::Residual } else { ReadoutKind::HiddenOnly },
        train_rate: 44_100.0,
    })
    .unwrap()
}
