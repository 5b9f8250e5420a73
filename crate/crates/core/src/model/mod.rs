//! Recurrent models and the rate-adjusted inference loop.
//!
//! A model is anything implementing [`RecurrentCell`]: a state update
//! `s_n = f(s_{n-1}, x_n)` over a packed state vector plus a readout
//! `y_n = g(s_n, x_n)`. Running at the training rate iterates `f` directly
//! ([`process_native`]). Running at another rate replaces `s_{n-1}` by an FIR
//! combination `sum_k l_k s_{n-1-k}` of the recent state history
//! ([`process_adjusted`], [`FeedbackLoop`]).

mod linear;
mod lstm;

use alloc::vec;
use alloc::vec::Vec;

pub use linear::LinearCell;
pub use lstm::{lstm_step, readout, LstmWeights, ReadoutKind, RnnModel};

use crate::linalg::Matrix;
use crate::{Error, Result};

/// One-step recurrent map with an affine-style readout.
///
/// Implementations must be pure: the same `prev` and `x` always produce the
/// same `next` bit for bit.
pub trait RecurrentCell {
    /// Length of the packed state vector.
    fn state_dim(&self) -> usize;

    /// Advance the state: writes `f(prev, x)` into `next`.
    fn step(&self, prev: &[f64], x: f64, next: &mut [f64]);

    /// Output sample for the state just produced by `step` with input `x`.
    fn readout(&self, state: &[f64], x: f64) -> f64;

    /// Jacobian of [`step`](Self::step) with respect to the packed state,
    /// evaluated at `state` with zero audio input.
    fn jacobian(&self, state: &[f64]) -> Matrix;
}

impl<C: RecurrentCell + ?Sized> RecurrentCell for &C {
    fn state_dim(&self) -> usize {
        (**self).state_dim()
    }
    fn step(&self, prev: &[f64], x: f64, next: &mut [f64]) {
        (**self).step(prev, x, next)
    }
    fn readout(&self, state: &[f64], x: f64) -> f64 {
        (**self).readout(state, x)
    }
    fn jacobian(&self, state: &[f64]) -> Matrix {
        (**self).jacobian(state)
    }
}

/// Ring buffer holding the last `K + 1` packed states, newest first.
#[derive(Debug, Clone)]
pub struct StateHistory {
    dim: usize,
    len: usize,
    head: usize,
    data: Vec<f64>,
}

impl StateHistory {
    /// Zero-filled history of `len` states of dimension `dim`.
    pub fn new(dim: usize, len: usize) -> Self {
        assert!(len >= 1, "history needs at least one slot");
        Self {
            dim,
            len,
            head: 0,
            data: vec![0.0; dim * len],
        }
    }

    pub fn capacity(&self) -> usize {
        self.len
    }

    /// `k`-th most recent state; `get(0)` is `s_{n-1}`.
    #[inline]
    pub fn get(&self, k: usize) -> &[f64] {
        debug_assert!(k < self.len);
        let slot = (self.head + k) % self.len;
        &self.data[slot * self.dim..(slot + 1) * self.dim]
    }

    pub fn push(&mut self, state: &[f64]) {
        debug_assert_eq!(state.len(), self.dim);
        self.head = (self.head + self.len - 1) % self.len;
        let slot = self.head;
        self.data[slot * self.dim..(slot + 1) * self.dim].copy_from_slice(state);
    }

    /// Overwrite every slot with `state`.
    pub fn fill(&mut self, state: &[f64]) {
        for chunk in self.data.chunks_exact_mut(self.dim) {
            chunk.copy_from_slice(state);
        }
    }
}

/// Streaming inference with an FIR filter in the state feedback path.
#[derive(Debug, Clone)]
pub struct FeedbackLoop<C> {
    cell: C,
    taps: Vec<f64>,
    history: StateHistory,
    filtered: Vec<f64>,
    next: Vec<f64>,
    index: usize,
}

impl<C: RecurrentCell> FeedbackLoop<C> {
    /// Zero initial state and zero-filled history.
    pub fn new(cell: C, taps: &[f64]) -> Result<Self> {
        check_taps(taps)?;
        let dim = cell.state_dim();
        Ok(Self {
            cell,
            taps: taps.to_vec(),
            history: StateHistory::new(dim, taps.len()),
            filtered: vec![0.0; dim],
            next: vec![0.0; dim],
            index: 0,
        })
    }

    /// Start from `state` held constant over the whole history.
    pub fn with_state(mut self, state: &[f64]) -> Result<Self> {
        if state.len() != self.cell.state_dim() {
            return Err(Error::ShapeMismatch {
                what: "initial state",
                expected: self.cell.state_dim(),
                found: state.len(),
            });
        }
        self.history.fill(state);
        Ok(self)
    }

    /// Swap in new taps of the same length, keeping the state history.
    pub fn set_taps(&mut self, taps: &[f64]) -> Result<()> {
        check_taps(taps)?;
        if taps.len() != self.taps.len() {
            return Err(Error::ShapeMismatch {
                what: "replacement taps",
                expected: self.taps.len(),
                found: taps.len(),
            });
        }
        self.taps.copy_from_slice(taps);
        Ok(())
    }

    /// Most recent packed state.
    pub fn state(&self) -> &[f64] {
        self.history.get(0)
    }

    pub fn cell(&self) -> &C {
        &self.cell
    }

    /// Process one input sample.
    pub fn tick(&mut self, x: f64) -> Result<f64> {
        self.filtered.copy_from_slice(self.history.get(0));
        let l0 = self.taps[0];
        for v in self.filtered.iter_mut() {
            *v *= l0;
        }
        for (k, &lk) in self.taps.iter().enumerate().skip(1) {
            for (acc, &s) in self.filtered.iter_mut().zip(self.history.get(k)) {
                *acc += lk * s;
            }
        }
        self.cell.step(&self.filtered, x, &mut self.next);
        if !self.next.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteState { index: self.index });
        }
        self.history.push(&self.next);
        self.index += 1;
        Ok(self.cell.readout(self.history.get(0), x))
    }
}

fn check_taps(taps: &[f64]) -> Result<()> {
    if taps.is_empty() {
        return Err(Error::EmptyFilter);
    }
    if !taps.iter().all(|t| t.is_finite()) {
        return Err(Error::InvalidArgument("filter taps must be finite"));
    }
    Ok(())
}

fn check_input(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFiniteInput { index }),
        None => Ok(()),
    }
}

/// Run the model at its training rate from a zero state.
pub fn process_native<C: RecurrentCell + ?Sized>(cell: &C, x: &[f64]) -> Result<Vec<f64>> {
    check_input(x)?;
    let dim = cell.state_dim();
    let mut prev = vec![0.0; dim];
    let mut next = vec![0.0; dim];
    let mut out = Vec::with_capacity(x.len());
    for (index, &xn) in x.iter().enumerate() {
        cell.step(&prev, xn, &mut next);
        if !next.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteState { index });
        }
        out.push(cell.readout(&next, xn));
        core::mem::swap(&mut prev, &mut next);
    }
    Ok(out)
}

/// Run the model with `taps` filtering the fed-back state, from a zero
/// state and zero history. With `taps == [1.0]` the output is bit-identical
/// to [`process_native`].
pub fn process_adjusted<C: RecurrentCell + ?Sized>(
    cell: &C,
    x: &[f64],
    taps: &[f64],
) -> Result<Vec<f64>> {
    check_input(x)?;
    let mut stream = FeedbackLoop::new(cell, taps)?;
    x.iter().map(|&xn| stream.tick(xn)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn history_is_newest_first() {
        let mut h = StateHistory::new(2, 3);
        h.push(&[1.0, 1.5]);
        h.push(&[2.0, 2.5]);
        assert_eq!(h.get(0), &[2.0, 2.5]);
        assert_eq!(h.get(1), &[1.0, 1.5]);
        assert_eq!(h.get(2), &[0.0, 0.0]);
        h.push(&[3.0, 3.5]);
        h.push(&[4.0, 4.5]);
        assert_eq!(h.get(0), &[4.0, 4.5]);
        assert_eq!(h.get(2), &[2.0, 2.5]);
    }

    #[test]
    fn empty_filter_rejected() {
        let cell = LinearCell::one_pole(0.5, 1.0);
        assert_eq!(process_adjusted(&cell, &[1.0], &[]), Err(Error::EmptyFilter));
    }

    #[test]
    fn empty_input_gives_empty_output() {
        let cell = LinearCell::one_pole(0.5, 1.0);
        assert!(process_native(&cell, &[]).unwrap().is_empty());
        assert!(process_adjusted(&cell, &[], &[0.5, 0.5]).unwrap().is_empty());
    }

    #[test]
    fn non_finite_input_reports_index() {
        let cell = LinearCell::one_pole(0.5, 1.0);
        assert_eq!(
            process_native(&cell, &[0.0, f64::NAN]),
            Err(Error::NonFiniteInput { index: 1 })
        );
    }

    #[test]
    fn blow_up_reports_sample_index() {
        let cell = LinearCell::one_pole(1e200, 1.0);
        let err = process_adjusted(&cell, &[1.0, 0.0, 0.0, 0.0], &[1.0]).unwrap_err();
        assert_eq!(err, Error::NonFiniteState { index: 2 });
    }

    #[test]
    fn one_pole_two_tap_recursion() {
        // s_n = 0.9 (0.5 s_{n-1} + 0.5 s_{n-2}) + x_n
        let cell = LinearCell::one_pole(0.9, 1.0);
        let y = process_adjusted(&cell, &[1.0, 0.0, 0.0], &[0.5, 0.5]).unwrap();
        assert_eq!(y[0], 1.0);
        assert!((y[1] - 0.45).abs() < 1e-15);
        assert!((y[2] - 0.9 * (0.5 * 0.45 + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn set_taps_keeps_history() {
        let cell = LinearCell::one_pole(0.5, 1.0);
        let mut run = FeedbackLoop::new(&cell, &[1.0, 0.0]).unwrap();
        run.tick(1.0).unwrap();
        run.tick(0.0).unwrap();
        run.set_taps(&[0.0, 1.0]).unwrap();
        // filtered state is now s_{n-2} = 1.0
        assert_eq!(run.tick(0.0).unwrap(), 0.5);
        assert!(run.set_taps(&[1.0]).is_err());
    }
}
