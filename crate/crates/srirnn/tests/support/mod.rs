#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// A GuitarML-style LSTM file with weights uniform in `±scale / sqrt(hidden)`.
pub fn model_json(seed: u64, hidden: usize, scale: f64, skip: bool) -> Value {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = scale / (hidden as f64).sqrt();
    let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.random_range(-bound..bound)).collect() };
    let g = 4 * hidden;
    let w_hh: Vec<Vec<f64>> = (0..g).map(|_| draw(hidden)).collect();
    let w_ih: Vec<Vec<f64>> = (0..g).map(|_| draw(1)).collect();
    json!({
        "model_data": {"model": "SimpleRNN", "unit_type": "LSTM", "hidden_size": hidden,
                       "input_size": 1, "skip": skip as u8, "num_layers": 1},
        "state_dict": {
            "rec.weight_ih_l0": w_ih,
            "rec.weight_hh_l0": w_hh,
            "rec.bias_ih_l0": draw(g),
            "rec.bias_hh_l0": draw(g),
            "lin.weight": [draw(hidden)],
            "lin.bias": draw(1),
        }
    })
}

pub fn write_model(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path
}

/// A small library: `count` models of mixed size and weight scale.
pub fn model_dir(dir: &Path, count: usize) -> Vec<PathBuf> {
    (0..count)
        .map(|i| {
            let hidden = 2 + 3 * (i % 4);
            let scale = [0.5, 1.5, 3.0][i % 3];
            write_model(dir, &format!("m{i:02}.json"), &model_json(100 + i as u64, hidden, scale, i % 2 == 0))
        })
        .collect()
}

pub fn noise(seed: u64, len: usize, amp: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| amp * rng.random_range(-1.0..1.0)).collect()
}

pub fn bin(name: &str) -> std::process::Command {
    let mut c = std::process::Command::new(env!("CARGO_BIN_EXE_srirnn"));
    c.arg(name);
    c
}
