//! Reference computations that share no code with the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Lagrange taps by exact interpolation: tap `l_k` is the value at `delta`
/// of the degree-K polynomial through `(j, [j == k])`, found by solving the
/// Vandermonde system over the rationals at the exact value of the `f64`.
pub fn lagrange_exact(delta: f64, order: usize) -> Vec<f64> {
    let n = order + 1;
    let d = BigRational::from_float(delta).unwrap();
    let int = |v: usize| BigRational::from_integer(BigInt::from(v));
    (0..n)
        .map(|k| {
            // augmented Vandermonde system V c = e_k
            let mut m: Vec<Vec<BigRational>> = (0..n)
                .map(|j| {
                    let mut row: Vec<BigRational> = (0..n).map(|p| num_traits::pow(int(j), p)).collect();
                    row.push(if j == k { BigRational::one() } else { BigRational::zero() });
                    row
                })
                .collect();
            for col in 0..n {
                let piv = (col..n).find(|&r| !m[r][col].is_zero()).unwrap();
                m.swap(col, piv);
                for r in 0..n {
                    if r != col && !m[r][col].is_zero() {
                        let f = &m[r][col] / &m[col][col];
                        for c in col..=n {
                            let v = &f * &m[col][c];
                            m[r][c] -= v;
                        }
                    }
                }
            }
            let coeffs: Vec<BigRational> = (0..n).map(|p| &m[p][n] / &m[p][p]).collect();
            let mut acc = BigRational::zero();
            for c in coeffs.iter().rev() {
                acc = acc * &d + c;
            }
            acc.to_f64().unwrap()
        })
        .collect()
}

/// Output of `b / (1 - a z^-1 L(z))` driven by `x` from rest: the impulse
/// response by power-series division, convolved with the input.
pub fn one_pole_response(a: f64, b: f64, taps: &[f64], x: &[f64]) -> Vec<f64> {
    let h = impulse_response(a, b, taps, x.len());
    (0..x.len()).map(|n| (0..=n).map(|m| h[m] * x[n - m]).sum()).collect()
}

/// First `len` samples of the impulse response of `b / (1 - a z^-1 L(z))`.
pub fn impulse_response(a: f64, b: f64, taps: &[f64], len: usize) -> Vec<f64> {
    // denominator d(z) = 1 - a sum_k l_k z^-(k+1)
    let mut d = vec![0.0; taps.len() + 1];
    d[0] = 1.0;
    for (k, l) in taps.iter().enumerate() {
        d[k + 1] = -a * l;
    }
    let mut h = vec![0.0; len];
    for n in 0..len {
        let mut v = if n == 0 { b } else { 0.0 };
        for (k, dk) in d.iter().enumerate().skip(1) {
            if k <= n {
                v -= dk * h[n - k];
            }
        }
        h[n] = v;
    }
    h
}
