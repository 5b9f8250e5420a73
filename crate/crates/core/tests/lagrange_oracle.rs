//! Lagrange taps against exact rational polynomial interpolation.

mod common;

use rand::Rng;
use srirnn_core::filters::{lagrange_coeffs, Ratio};

#[test]
fn random_draws_match_exact_interpolation() {
    let mut rng = common::rng(7);
    for _ in 0..1000 {
        let delta = rng.random_range(-1.0..1.0);
        let order = rng.random_range(1..=5);
        let got = lagrange_coeffs(delta, order).unwrap();
        let want = common::oracles::lagrange_exact(delta, order);
        for (a, b) in got.taps().iter().zip(&want) {
            assert!((a - b).abs() <= 1e-12, "delta {delta} K {order}: {a} vs {b}");
        }
        let sum: f64 = got.taps().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn advance_for_147_over_160() {
    let delta = Ratio::new(147, 160).unwrap().delta();
    assert_eq!(delta, -13.0 / 160.0);
    let got = lagrange_coeffs(delta, 3).unwrap();
    for (a, b) in got.taps().iter().zip(common::oracles::lagrange_exact(delta, 3)) {
        assert!((a - b).abs() <= 1e-15);
    }
}

#[test]
fn integer_delays_collapse_to_impulses() {
    for order in 1..=5 {
        for m in 0..=order {
            let taps = lagrange_coeffs(m as f64, order).unwrap();
            for (k, &t) in taps.taps().iter().enumerate() {
                assert_eq!(t, if k == m { 1.0 } else { 0.0 }, "m {m} K {order}");
            }
        }
    }
}
