//! Linearised stability of the filter-modified recursion.
//!
//! Around a zero-input fixed point `a` the adjusted recursion behaves like
//! `s_n = J (sum_k l_k s_{n-1-k}) + const`, a linear system on the stacked
//! history whose one-step matrix is the block companion
//!
//! ```text
//!     [ l_0 J  l_1 J  ...  l_K J ]
//! A = [   I      0    ...    0   ]
//!     [          ...             ]
//!     [   0     ...     I    0   ]
//! ```
//!
//! The filter is predicted safe when every eigenvalue of `A` lies in the
//! closed unit disc. Since `A` is built from `l (x) J`, its eigenvalues are
//! also the roots of `z^(K+1) = mu (l_0 z^K + ... + l_K)` for each eigenvalue
//! `mu` of `J`, which gives a second, much cheaper path to the same poles.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::{eigenvalues, polynomial_roots, Matrix};
use crate::model::{RecurrentCell, RnnModel};
use crate::{Error, Result};

/// Fixed-point residuals above this mark the report as low confidence.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
/// Half-width of the band around `rho = 1` reported as marginal.
pub const MARGINAL_BAND: f64 = 1e-9;

/// Approximate zero-input equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    /// Time-averaged packed state.
    pub state: Vec<f64>,
    /// `max_i |f(a, 0)_i - a_i|`.
    pub residual: f64,
    pub run_len: usize,
    pub avg_len: usize,
}

impl FixedPoint {
    pub const DEFAULT_RUN: usize = 10_000;
    pub const DEFAULT_AVERAGE: usize = 1_000;

    /// False when the trajectory did not settle (limit cycle or slow decay).
    pub fn is_confident(&self) -> bool {
        self.residual <= RESIDUAL_TOLERANCE
    }
}

/// Run the unmodified recursion with zero input from a zero state for
/// `run_len` samples and average the last `avg_len` states.
pub fn find_fixed_point<C: RecurrentCell + ?Sized>(
    cell: &C,
    run_len: usize,
    avg_len: usize,
) -> Result<FixedPoint> {
    if avg_len == 0 || avg_len > run_len {
        return Err(Error::InvalidArgument("averaging window must be in 1..=run_len"));
    }
    let dim = cell.state_dim();
    let mut prev = vec![0.0; dim];
    let mut next = vec![0.0; dim];
    let mut sum = vec![0.0; dim];
    for index in 0..run_len {
        cell.step(&prev, 0.0, &mut next);
        if !next.iter().all(|v| v.is_finite()) {
            return Err(Error::Diverged { index });
        }
        if index >= run_len - avg_len {
            for (acc, v) in sum.iter_mut().zip(&next) {
                *acc += v;
            }
        }
        core::mem::swap(&mut prev, &mut next);
    }
    let state: Vec<f64> = sum.iter().map(|v| v / avg_len as f64).collect();
    cell.step(&state, 0.0, &mut next);
    let residual = next
        .iter()
        .zip(&state)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(FixedPoint {
        state,
        residual,
        run_len,
        avg_len,
    })
}

/// Analytic Jacobian of the packed LSTM update at `state` with zero input.
pub fn lstm_jacobian(model: &RnnModel, state: &[f64]) -> Result<Matrix> {
    if state.len() != model.state_dim() {
        return Err(Error::ShapeMismatch {
            what: "packed state",
            expected: model.state_dim(),
            found: state.len(),
        });
    }
    if let Some(index) = state.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { index });
    }
    Ok(model.jacobian(state))
}

/// Linearisation of the adjusted recursion around a fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearisedSystem {
    pub jacobian: Matrix,
    pub taps: Vec<f64>,
    /// Block companion matrix of size `H (K + 1)`.
    pub companion: Matrix,
    /// `[f(a) - J a; 0]`. Shifts the equilibrium, not the poles.
    pub offset: Vec<f64>,
}

/// Assemble the block companion matrix for `jacobian` and `taps`.
pub fn build_companion(jacobian: &Matrix, taps: &[f64]) -> Result<Matrix> {
    if taps.is_empty() {
        return Err(Error::EmptyFilter);
    }
    if !jacobian.is_square() {
        return Err(Error::ShapeMismatch {
            what: "jacobian columns",
            expected: jacobian.rows(),
            found: jacobian.cols(),
        });
    }
    let h = jacobian.rows();
    let n = h * taps.len();
    let mut a = Matrix::zeros(n, n);
    for (k, &l) in taps.iter().enumerate() {
        for i in 0..h {
            for j in 0..h {
                a[(i, k * h + j)] = l * jacobian[(i, j)];
            }
        }
    }
    for i in h..n {
        a[(i, i - h)] = 1.0;
    }
    Ok(a)
}

/// Linearise `cell` at `point` for the given filter taps.
pub fn linearise<C: RecurrentCell + ?Sized>(
    cell: &C,
    point: &FixedPoint,
    taps: &[f64],
) -> Result<LinearisedSystem> {
    let h = cell.state_dim();
    if point.state.len() != h {
        return Err(Error::ShapeMismatch {
            what: "fixed point",
            expected: h,
            found: point.state.len(),
        });
    }
    let jacobian = cell.jacobian(&point.state);
    let companion = build_companion(&jacobian, taps)?;
    let mut image = vec![0.0; h];
    cell.step(&point.state, 0.0, &mut image);
    let ja = jacobian.mul_vec(&point.state);
    let mut offset = vec![0.0; h * taps.len()];
    for i in 0..h {
        offset[i] = image[i] - ja[i];
    }
    Ok(LinearisedSystem {
        jacobian,
        taps: taps.to_vec(),
        companion,
        offset,
    })
}

/// Eigenvalues of the assembled companion matrix.
pub fn poles_dense(companion: &Matrix) -> Result<Vec<Complex64>> {
    eigenvalues(companion)
}

/// Poles from the eigenvalues of `jacobian` and one degree-`K + 1`
/// polynomial per eigenvalue.
pub fn poles_structured(jacobian: &Matrix, taps: &[f64]) -> Result<Vec<Complex64>> {
    if taps.is_empty() {
        return Err(Error::EmptyFilter);
    }
    let mus = eigenvalues(jacobian)?;
    let mut poles = Vec::with_capacity(mus.len() * taps.len());
    let mut coeffs = vec![Complex64::new(0.0, 0.0); taps.len() + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    for &mu in &mus {
        if taps.len() == 1 {
            poles.push(mu * taps[0]);
            continue;
        }
        // roots for a lower-half mu are the conjugates of its partner's
        let flip = mu.im < 0.0;
        let m = if flip { mu.conj() } else { mu };
        for (c, &l) in coeffs[1..].iter_mut().zip(taps) {
            *c = -m * l;
        }
        let roots = polynomial_roots(&coeffs)?;
        poles.extend(roots.into_iter().map(|z| if flip { z.conj() } else { z }));
    }
    Ok(poles)
}

/// Largest distance between matched elements of two pole sets, matching
/// each pole to its nearest unused partner. Infinite when the counts differ.
pub fn pole_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let one_way = |a: &[Complex64], b: &[Complex64]| {
        let mut used = vec![false; b.len()];
        let mut worst: f64 = 0.0;
        for za in a {
            let mut best = (usize::MAX, f64::INFINITY);
            for (j, zb) in b.iter().enumerate() {
                let d = (za - zb).norm();
                if !used[j] && d < best.1 {
                    best = (j, d);
                }
            }
            used[best.0] = true;
            worst = worst.max(best.1);
        }
        worst
    };
    one_way(a, b).max(one_way(b, a))
}

/// Largest `|z - conj(w)|` over a nearest matching of the set with its own
/// conjugate. Zero for exactly conjugate-symmetric sets.
pub fn conjugate_asymmetry(poles: &[Complex64]) -> f64 {
    let conj: Vec<Complex64> = poles.iter().map(|z| z.conj()).collect();
    pole_distance(poles, &conj)
}

pub fn spectral_radius(poles: &[Complex64]) -> f64 {
    poles.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PoleMethod {
    /// Dense eigensolver on the companion matrix, falling back to the
    /// structured path if it does not converge.
    #[default]
    Dense,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    /// `|rho - 1| <= MARGINAL_BAND`.
    Marginal,
    Unstable,
    /// The zero-input trajectory diverged, so there is no fixed point.
    Indeterminate,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Marginal => "marginal",
            Verdict::Unstable => "unstable",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

/// A pole outside the unit circle and the ringing it predicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub pole: Complex64,
    /// `arg z` in `[0, pi]`.
    pub angle: f64,
    /// `angle / (2 pi)` times the inference rate.
    pub frequency_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub run_len: usize,
    pub avg_len: usize,
    pub method: PoleMethod,
    /// Sample rate the adjusted model runs at, for resonance frequencies.
    pub inference_rate: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            run_len: FixedPoint::DEFAULT_RUN,
            avg_len: FixedPoint::DEFAULT_AVERAGE,
            method: PoleMethod::Dense,
            inference_rate: 44_100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub verdict: Verdict,
    /// `rho <= 1`. False for indeterminate reports.
    pub stable: bool,
    /// Empty for indeterminate reports.
    pub poles: Vec<Complex64>,
    /// NaN for indeterminate reports.
    pub spectral_radius: f64,
    /// `1 - rho`.
    pub margin: f64,
    /// One entry per unstable pole in the upper half plane, by angle.
    pub resonances: Vec<Resonance>,
    pub fixed_point: Option<FixedPoint>,
    /// Set when the fixed-point residual exceeds [`RESIDUAL_TOLERANCE`].
    pub low_confidence: bool,
    /// Which path produced the poles.
    pub method: PoleMethod,
}

impl StabilityReport {
    pub fn indeterminate(method: PoleMethod) -> Self {
        Self {
            verdict: Verdict::Indeterminate,
            stable: false,
            poles: Vec::new(),
            spectral_radius: f64::NAN,
            margin: f64::NAN,
            resonances: Vec::new(),
            fixed_point: None,
            low_confidence: true,
            method,
        }
    }

    /// Verdict from an already computed pole set.
    pub fn from_poles(poles: Vec<Complex64>, inference_rate: f64, method: PoleMethod) -> Self {
        let rho = spectral_radius(&poles);
        let verdict = if (rho - 1.0).abs() <= MARGINAL_BAND {
            Verdict::Marginal
        } else if rho < 1.0 {
            Verdict::Stable
        } else {
            Verdict::Unstable
        };
        let mut resonances: Vec<Resonance> = poles
            .iter()
            .filter(|z| z.norm() > 1.0 && z.im >= 0.0)
            .map(|&pole| {
                let angle = pole.arg();
                Resonance {
                    pole,
                    angle,
                    frequency_hz: angle / (2.0 * PI) * inference_rate,
                }
            })
            .collect();
        resonances.sort_by(|a, b| a.angle.total_cmp(&b.angle));
        Self {
            verdict,
            stable: rho <= 1.0,
            poles,
            spectral_radius: rho,
            margin: 1.0 - rho,
            resonances,
            fixed_point: None,
            low_confidence: false,
            method,
        }
    }
}

/// Fixed point, Jacobian, poles and verdict for `cell` with `taps` in the
/// feedback loop.
pub fn predict_stability<C: RecurrentCell + ?Sized>(
    cell: &C,
    taps: &[f64],
    opts: &AnalysisOptions,
) -> Result<StabilityReport> {
    if taps.is_empty() {
        return Err(Error::EmptyFilter);
    }
    let point = match find_fixed_point(cell, opts.run_len, opts.avg_len) {
        Ok(p) => p,
        Err(Error::Diverged { .. }) => return Ok(StabilityReport::indeterminate(opts.method)),
        Err(e) => return Err(e),
    };
    stability_at(cell, point, taps, opts)
}

/// As [`predict_stability`] with the fixed point already found, so that
/// several filters can share one search.
pub fn stability_at<C: RecurrentCell + ?Sized>(
    cell: &C,
    point: FixedPoint,
    taps: &[f64],
    opts: &AnalysisOptions,
) -> Result<StabilityReport> {
    if taps.is_empty() {
        return Err(Error::EmptyFilter);
    }
    if point.state.len() != cell.state_dim() {
        return Err(Error::ShapeMismatch {
            what: "fixed point",
            expected: cell.state_dim(),
            found: point.state.len(),
        });
    }
    let jacobian = cell.jacobian(&point.state);
    if !jacobian.is_finite() {
        return Ok(StabilityReport::indeterminate(opts.method));
    }
    let (poles, method) = match opts.method {
        PoleMethod::Structured => (poles_structured(&jacobian, taps)?, PoleMethod::Structured),
        PoleMethod::Dense => match poles_dense(&build_companion(&jacobian, taps)?) {
            Ok(p) => (p, PoleMethod::Dense),
            Err(Error::EigenNoConvergence { .. }) => {
                (poles_structured(&jacobian, taps)?, PoleMethod::Structured)
            }
            Err(e) => return Err(e),
        },
    };
    let mut report = StabilityReport::from_poles(poles, opts.inference_rate, method);
    report.low_confidence = !point.is_confident();
    report.fixed_point = Some(point);
    Ok(report)
}
