//! Zero-input ringdown: settle with no filter, then switch the filter in and
//! watch for self-oscillation.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use srirnn_core::model::{FeedbackLoop, RecurrentCell};

use crate::Result;

pub const WINDOW: usize = 1024;
pub const HOP: usize = 256;
/// Magnitudes below this are floored before taking dB.
const FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Ringdown {
    pub output: Vec<f64>,
    /// Sample (counted from the start) where the state became non-finite.
    pub diverged_at: Option<usize>,
}

/// `settle` samples with taps `[1, 0, ..., 0]`, then `run` samples with
/// `taps`, all with zero input. Stops early if the state blows up.
pub fn ringdown<C: RecurrentCell>(cell: C, taps: &[f64], settle: usize, run: usize) -> Result<Ringdown> {
    let mut naive = vec![0.0; taps.len().max(1)];
    naive[0] = 1.0;
    let mut stream = FeedbackLoop::new(cell, &naive)?;
    let mut output = Vec::with_capacity(settle + run);
    for n in 0..settle + run {
        if n == settle {
            stream.set_taps(taps)?;
        }
        match stream.tick(0.0) {
            Ok(y) => output.push(y),
            Err(srirnn_core::Error::NonFiniteState { .. }) => {
                return Ok(Ringdown {
                    output,
                    diverged_at: Some(n),
                })
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Ringdown {
        output,
        diverged_at: None,
    })
}

/// Hann-windowed STFT magnitude in dB, rows `(frame, bin, dB)` for bins
/// `0..=window/2`. Frames that do not fit entirely are dropped.
pub fn stft_db(signal: &[f64], window: usize, hop: usize) -> Vec<(usize, usize, f64)> {
    if window == 0 || hop == 0 || signal.len() < window {
        return Vec::new();
    }
    let hann: Vec<f64> = (0..window)
        .map(|n| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / window as f64).cos())
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(window);
    let mut rows = Vec::new();
    let mut buf = vec![Complex64::new(0.0, 0.0); window];
    for (frame, start) in (0..=signal.len() - window).step_by(hop).enumerate() {
        for (b, (s, w)) in buf.iter_mut().zip(signal[start..start + window].iter().zip(&hann)) {
            *b = Complex64::new(s * w, 0.0);
        }
        fft.process(&mut buf);
        for (bin, z) in buf.iter().take(window / 2 + 1).enumerate() {
            rows.push((frame, bin, 20.0 * z.norm().max(FLOOR).log10()));
        }
    }
    rows
}
