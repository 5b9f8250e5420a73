//! Fractional delay / advance FIR design.
//!
//! The filter approximates `s(n - 1 - delta)` from the stored states
//! `s(n - 1 - k)`, `k = 0..=K`, where `delta = F's / Fs - 1`. Positive
//! `delta` (oversampling) is an interpolation inside the stored history;
//! negative `delta` (undersampling) extrapolates slightly into the future of
//! the newest stored state.

mod minimax;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

pub use minimax::{minimax_coeffs, MinimaxDesign, MinimaxOptions};

use crate::math::{atan2, cos, sin};
use crate::{Error, Result};

/// Largest supported filter order; the Lagrange denominators stay exact
/// integers in `f64` well beyond this.
pub const MAX_ORDER: usize = 24;

/// Rate conversion ratio `F's / Fs = p / q` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ratio {
    p: u64,
    q: u64,
}

impl Ratio {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p <= 0 || q <= 0 {
            return Err(Error::InvalidRatio { p, q });
        }
        let g = gcd(p as u64, q as u64);
        Ok(Self {
            p: p as u64 / g,
            q: q as u64 / g,
        })
    }

    pub fn identity() -> Self {
        Self { p: 1, q: 1 }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn inverse(&self) -> Self {
        Self { p: self.q, q: self.p }
    }

    pub fn as_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `p / q - 1`, from the exact integer numerator `p - q`.
    pub fn delta(&self) -> f64 {
        (self.p as i128 - self.q as i128) as f64 / self.q as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = Error::InvalidArgument("ratio must look like P/Q with positive integers");
        let (p, q) = s.trim().split_once('/').ok_or(bad.clone())?;
        let p: i64 = p.trim().parse().map_err(|_| bad.clone())?;
        let q: i64 = q.trim().parse().map_err(|_| bad)?;
        Self::new(p, q)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Training rate, inference rate and the state delay adjustment between
/// them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaySpec {
    pub train_rate: f64,
    pub inference_rate: f64,
    pub ratio: Ratio,
    pub delta: f64,
}

impl DelaySpec {
    pub fn new(ratio: Ratio, train_rate: f64) -> Result<Self> {
        if !(train_rate > 0.0 && train_rate.is_finite()) {
            return Err(Error::InvalidArgument("training rate must be positive"));
        }
        Ok(Self {
            train_rate,
            inference_rate: train_rate * ratio.p as f64 / ratio.q as f64,
            ratio,
            delta: ratio.delta(),
        })
    }
}

/// Delay spec for converting a 44.1 kHz model by `p / q`.
pub fn delta_for_ratio(p: i64, q: i64) -> Result<DelaySpec> {
    DelaySpec::new(Ratio::new(p, q)?, 44_100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DesignMethod {
    /// Single unit tap: no compensation.
    Identity,
    Lagrange,
    Minimax,
}

impl DesignMethod {
    pub fn name(&self) -> &'static str {
        match self {
            DesignMethod::Identity => "naive",
            DesignMethod::Lagrange => "lagrange",
            DesignMethod::Minimax => "minimax",
        }
    }
}

impl fmt::Display for DesignMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DesignMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "naive" | "identity" | "none" => Ok(Self::Identity),
            "lagrange" => Ok(Self::Lagrange),
            "minimax" => Ok(Self::Minimax),
            _ => Err(Error::InvalidArgument("method must be naive, lagrange or minimax")),
        }
    }
}

/// Designed feedback filter taps `l_0..=l_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirCoefficients {
    taps: Vec<f64>,
    method: DesignMethod,
    delta: f64,
}

impl FirCoefficients {
    /// The uncompensated filter `[1]`, tagged with the delay it ignores.
    pub fn identity(delta: f64) -> Self {
        Self {
            taps: vec![1.0],
            method: DesignMethod::Identity,
            delta,
        }
    }

    /// Wrap externally supplied taps.
    pub fn from_taps(taps: Vec<f64>, method: DesignMethod, delta: f64) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::EmptyFilter);
        }
        if !taps.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidArgument("filter taps must be finite"));
        }
        Ok(Self { taps, method, delta })
    }

    /// Design a filter for `spec` by `method`. `Identity` ignores `order`.
    pub fn design(spec: &DelaySpec, method: DesignMethod, order: usize) -> Result<Self> {
        match method {
            DesignMethod::Identity => Ok(Self::identity(spec.delta)),
            DesignMethod::Lagrange => lagrange_coeffs(spec.delta, order),
            DesignMethod::Minimax => {
                Ok(minimax_coeffs(spec.delta, order, &MinimaxOptions::default())?.coefficients)
            }
        }
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn order(&self) -> usize {
        self.taps.len() - 1
    }

    pub fn method(&self) -> DesignMethod {
        self.method
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `sum_k l_k`, the gain at DC.
    pub fn dc_gain(&self) -> f64 {
        self.taps.iter().sum()
    }
}

/// Lagrange interpolation (or extrapolation, for `delta < 0`) taps
/// `l_k = prod_{j != k} (delta - j) / (k - j)`.
pub fn lagrange_coeffs(delta: f64, order: usize) -> Result<FirCoefficients> {
    if !delta.is_finite() {
        return Err(Error::InvalidArgument("delta must be finite"));
    }
    if order == 0 {
        if delta == 0.0 {
            return Ok(FirCoefficients {
                taps: vec![1.0],
                method: DesignMethod::Lagrange,
                delta,
            });
        }
        return Err(Error::InvalidOrder {
            order,
            reason: "a single tap cannot represent a nonzero delay",
        });
    }
    if order > MAX_ORDER {
        return Err(Error::InvalidOrder {
            order,
            reason: "order exceeds the supported maximum",
        });
    }
    let taps = (0..=order)
        .map(|k| {
            let mut num = 1.0;
            let mut den = 1.0;
            for j in (0..=order).filter(|&j| j != k) {
                num *= delta - j as f64;
                den *= k as f64 - j as f64;
            }
            num / den
        })
        .collect();
    Ok(FirCoefficients {
        taps,
        method: DesignMethod::Lagrange,
        delta,
    })
}

/// `H(w) = sum_k l_k e^{-j w k}`.
pub fn response_at(taps: &[f64], omega: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &l) in taps.iter().enumerate() {
        let ph = -omega * k as f64;
        acc += Complex64::new(l * cos(ph), l * sin(ph));
    }
    acc
}

/// Uniform grid of `n` points on `[0, upper]`, both ends included.
pub fn uniform_grid(upper: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| upper * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Worst-case complex error `max |H(w) - e^{-j w delta}|` over the uniform
/// grid of `grid_size` points on `[0, 2 pi band_fraction]`.
pub fn band_error(taps: &[f64], delta: f64, band_fraction: f64, grid_size: usize) -> f64 {
    uniform_grid(2.0 * core::f64::consts::PI * band_fraction, grid_size)
        .into_iter()
        .map(|w| {
            let target = Complex64::new(cos(-w * delta), sin(-w * delta));
            (response_at(taps, w) - target).norm()
        })
        .fold(0.0, f64::max)
}

/// Filter response sampled on a uniform grid over `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub omega: Vec<f64>,
    pub response: Vec<Complex64>,
    pub magnitude: Vec<f64>,
    /// `-arg H(w) / w - delta`, with the `w -> 0` limit at the first point.
    pub phase_delay_error: Vec<f64>,
}

pub fn frequency_response(filter: &FirCoefficients, grid_size: usize) -> Result<FrequencyResponse> {
    response_for_taps(filter.taps(), filter.delta(), grid_size)
}

/// As [`frequency_response`] for bare taps and a target delay.
pub fn response_for_taps(taps: &[f64], delta: f64, grid_size: usize) -> Result<FrequencyResponse> {
    if taps.is_empty() {
        return Err(Error::EmptyFilter);
    }
    if grid_size < 2 {
        return Err(Error::InvalidArgument("response grid needs at least two points"));
    }
    let omega = uniform_grid(core::f64::consts::PI, grid_size);
    let response: Vec<Complex64> = omega.iter().map(|&w| response_at(taps, w)).collect();
    let magnitude = response.iter().map(|h| h.norm()).collect();

    let dc: f64 = taps.iter().sum();
    let first_moment: f64 = taps.iter().enumerate().map(|(k, l)| k as f64 * l).sum();
    let mut phase_delay_error = Vec::with_capacity(grid_size);
    let mut prev = if dc < 0.0 { core::f64::consts::PI } else { 0.0 };
    for (&w, h) in omega.iter().zip(&response) {
        if w == 0.0 {
            phase_delay_error.push(first_moment / dc - delta);
            continue;
        }
        let mut phase = atan2(h.im, h.re);
        // unwrap against the previous grid point
        let two_pi = 2.0 * core::f64::consts::PI;
        while phase - prev > core::f64::consts::PI {
            phase -= two_pi;
        }
        while phase - prev < -core::f64::consts::PI {
            phase += two_pi;
        }
        prev = phase;
        phase_delay_error.push(-phase / w - delta);
    }
    Ok(FrequencyResponse {
        omega,
        response,
        magnitude,
        phase_delay_error,
    })
}
