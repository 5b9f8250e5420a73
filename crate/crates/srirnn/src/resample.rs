//! Rational sample-rate conversion by spectral truncation or zero padding
//! of a single full-length DFT.
//!
//! Nyquist handling follows the usual convention for real signals: when
//! downsampling to an even length the new Nyquist bin is `X[M/2] + X[N-M/2]`
//! (twice the real part of the old bin), and when upsampling from an even
//! length the old Nyquist bin is split in half between `+N/2` and `-N/2`.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use srirnn_core::filters::Ratio;

use crate::{Error, Result};

/// Output of [`dft_resample_detailed`].
#[derive(Debug, Clone)]
pub struct Resampled {
    pub samples: Vec<f64>,
    /// Largest imaginary part left by the inverse transform, after scaling.
    pub imag_residue: f64,
}

/// Longest prefix of `x` whose length is a multiple of `q`.
pub fn trim_to_multiple(x: &[f64], q: u64) -> &[f64] {
    let q = q as usize;
    &x[..x.len() - x.len() % q]
}

/// Resample `x` by `ratio = P/Q`: `N` samples in, `N P / Q` out.
pub fn dft_resample(x: &[f64], ratio: Ratio) -> Result<Vec<f64>> {
    Ok(dft_resample_detailed(x, ratio)?.samples)
}

pub fn dft_resample_detailed(x: &[f64], ratio: Ratio) -> Result<Resampled> {
    let n = x.len();
    let (p, q) = (ratio.p() as usize, ratio.q() as usize);
    if n < 2 {
        return Err(Error::ResampleLength {
            len: n,
            ratio: ratio.to_string(),
            reason: "need at least two samples",
        });
    }
    if !n.is_multiple_of(q) {
        return Err(Error::ResampleLength {
            len: n,
            ratio: ratio.to_string(),
            reason: "length is not a multiple of the denominator",
        });
    }
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(srirnn_core::Error::NonFiniteInput { index }.into());
    }
    let m = n / q * p;
    if m == n {
        return Ok(Resampled {
            samples: x.to_vec(),
            imag_residue: 0.0,
        });
    }

    let mut planner = FftPlanner::<f64>::new();
    let mut spectrum: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut spectrum);

    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; m];
    let shared = n.min(m);
    // positive frequencies strictly below the shared Nyquist
    let below = shared.div_ceil(2);
    out[..below].copy_from_slice(&spectrum[..below]);
    if shared.is_multiple_of(2) {
        let half = shared / 2;
        if m < n {
            out[half] = Complex64::new(2.0 * spectrum[half].re, 0.0);
        } else {
            out[half] = spectrum[half] * 0.5;
            out[m - half] = out[half].conj();
        }
    }
    // negative frequencies by conjugate symmetry keeps the output real
    for k in 1..shared.div_ceil(2) {
        out[m - k] = out[k].conj();
    }

    planner.plan_fft_inverse(m).process(&mut out);
    let scale = 1.0 / n as f64;
    let imag_residue = out.iter().map(|z| (z.im * scale).abs()).fold(0.0, f64::max);
    Ok(Resampled {
        samples: out.iter().map(|z| z.re * scale).collect(),
        imag_residue,
    })
}
