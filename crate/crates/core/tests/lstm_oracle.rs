//! LSTM update, readout and Jacobian against independent scalar code.

mod common;

use rand::Rng;
use srirnn_core::analysis::lstm_jacobian;
use srirnn_core::model::{lstm_step, process_adjusted, process_native, readout, RecurrentCell, ReadoutKind, RnnModel};

fn sig(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Straight transcription of the gate equations with explicit index loops.
fn scalar_step(m: &RnnModel, h: &[f64], c: &[f64], x: f64) -> (Vec<f64>, Vec<f64>) {
    let n = m.hidden_size();
    let mut u = vec![x];
    u.extend_from_slice(m.controls());
    let z = |row: usize| {
        let mut acc = m.bias()[row];
        for p in 0..m.input_size() {
            acc += m.w_ih()[(row, p)] * u[p];
        }
        for q in 0..n {
            acc += m.w_hh()[(row, q)] * h[q];
        }
        acc
    };
    let mut h2 = vec![0.0; n];
    let mut c2 = vec![0.0; n];
    for j in 0..n {
        let i = sig(z(j));
        let f = sig(z(n + j));
        let g = z(2 * n + j).tanh();
        let o = sig(z(3 * n + j));
        c2[j] = f * c[j] + i * g;
        h2[j] = o * c2[j].tanh();
    }
    (h2, c2)
}

fn scalar_readout(m: &RnnModel, h: &[f64], x: f64) -> f64 {
    let mut y = m.out_b();
    for (w, v) in m.out_w().iter().zip(h) {
        y += w * v;
    }
    if m.readout_kind() == ReadoutKind::Residual {
        y += x;
    }
    y
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[test]
fn step_and_readout_match_scalar_reference() {
    let mut rng = common::rng(11);
    for trial in 0..20 {
        let hidden = rng.random_range(1..=12);
        let inputs = rng.random_range(1..=3);
        let controls = common::uniform(&mut rng, inputs - 1, 1.0);
        let m = common::random_model(&mut rng, hidden, inputs, 2.0).with_controls(&controls).unwrap();
        let s = common::uniform(&mut rng, 2 * hidden, 1.5);
        let x = rng.random_range(-1.0..1.0);
        let got = lstm_step(&m, &s, x).unwrap();
        let (h, c) = scalar_step(&m, &s[..hidden], &s[hidden..], x);
        for (a, b) in got.iter().zip(h.iter().chain(&c)) {
            assert!(rel(*a, *b) <= 1e-12, "trial {trial}: {a} vs {b}");
        }
        let y = readout(&m, &h, x).unwrap();
        assert!(rel(y, scalar_readout(&m, &h, x)) <= 1e-12);
    }
}

#[test]
fn native_run_matches_scalar_reference() {
    let mut rng = common::rng(12);
    let m = common::random_model(&mut rng, 8, 1, 2.0);
    let x = common::uniform(&mut rng, 1000, 1.0);
    let y = process_native(&m, &x).unwrap();
    let (mut h, mut c) = (vec![0.0; 8], vec![0.0; 8]);
    for (n, &xn) in x.iter().enumerate() {
        (h, c) = scalar_step(&m, &h, &c, xn);
        let want = scalar_readout(&m, &h, xn);
        assert!((y[n] - want).abs() <= 1e-12 * want.abs().max(1.0), "sample {n}");
    }
}

#[test]
fn jacobian_matches_central_differences() {
    let mut rng = common::rng(13);
    let step = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let hidden = rng.random_range(2..=40);
        let m = common::random_model(&mut rng, hidden, 1, 3.0);
        let a = common::uniform(&mut rng, 2 * hidden, 1.0);
        let jac = lstm_jacobian(&m, &a).unwrap();
        let dim = 2 * hidden;
        let (mut plus, mut minus) = (vec![0.0; dim], vec![0.0; dim]);
        for col in 0..dim {
            let mut s = a.clone();
            s[col] = a[col] + step;
            m.step(&s, 0.0, &mut plus);
            s[col] = a[col] - step;
            m.step(&s, 0.0, &mut minus);
            for row in 0..dim {
                let fd = (plus[row] - minus[row]) / (2.0 * step);
                let err = (jac[(row, col)] - fd).abs() / fd.abs().max(1e-3);
                worst = worst.max(err);
            }
        }
    }
    assert!(worst <= 1e-5, "worst relative error {worst:e}");
}

#[test]
fn single_tap_identity_is_bit_exact() {
    let mut rng = common::rng(14);
    for _ in 0..10 {
        let hidden = rng.random_range(1..=16);
        let m = common::random_model(&mut rng, hidden, 1, 2.0);
        let x = common::uniform(&mut rng, 2000, 1.0);
        let a = process_native(&m, &x).unwrap();
        let b = process_adjusted(&m, &x, &[1.0]).unwrap();
        assert_eq!(a.len(), x.len());
        assert!(a.iter().zip(&b).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
}

#[test]
fn runs_are_deterministic() {
    let mut rng = common::rng(15);
    let m = common::random_model(&mut rng, 10, 1, 2.0);
    let x = common::uniform(&mut rng, 500, 1.0);
    let taps = [1.1, -0.15, 0.05];
    let a = process_adjusted(&m, &x, &taps).unwrap();
    let b = process_adjusted(&m, &x, &taps).unwrap();
    assert!(a.iter().zip(&b).all(|(p, q)| p.to_bits() == q.to_bits()));
}
