//! Single-layer LSTM with an affine readout.
//!
//! Gate rows are stacked in the order (input, forget, cell, output), each
//! block `hidden_size` rows tall. The packed state is `[h; c]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::RecurrentCell;
use crate::linalg::Matrix;
use crate::math::{sigmoid, tanh};
use crate::{Error, Result};

/// Whether the readout adds the audio input back onto the linear layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadoutKind {
    /// `y = w . h + b`
    #[default]
    HiddenOnly,
    /// `y = w . h + b + x`
    Residual,
}

/// Raw weights as exported, before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmWeights {
    pub hidden_size: usize,
    pub input_size: usize,
    /// `(4 * hidden_size) x input_size`, row-major.
    pub w_ih: Vec<f64>,
    /// `(4 * hidden_size) x hidden_size`, row-major.
    pub w_hh: Vec<f64>,
    /// Combined gate bias, `4 * hidden_size`.
    pub bias: Vec<f64>,
    /// Readout weights, `hidden_size`.
    pub out_w: Vec<f64>,
    pub out_b: f64,
    pub readout: ReadoutKind,
    /// Training sample rate in Hz.
    pub train_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RnnModel {
    hidden_size: usize,
    input_size: usize,
    w_ih: Matrix,
    w_hh: Matrix,
    bias: Vec<f64>,
    out_w: Vec<f64>,
    out_b: f64,
    readout: ReadoutKind,
    train_rate: f64,
    // Held values for conditioning inputs 1..input_size.
    controls: Vec<f64>,
}

impl RnnModel {
    pub fn new(w: LstmWeights) -> Result<Self> {
        let h = w.hidden_size;
        if h == 0 {
            return Err(Error::InvalidModel("hidden_size must be positive".into()));
        }
        if w.input_size == 0 {
            return Err(Error::InvalidModel("input_size must be at least 1".into()));
        }
        let gates = 4 * h;
        check_len("w_ih", gates * w.input_size, w.w_ih.len())?;
        check_len("w_hh", gates * h, w.w_hh.len())?;
        check_len("bias", gates, w.bias.len())?;
        check_len("out_w", h, w.out_w.len())?;
        let all = w
            .w_ih
            .iter()
            .chain(&w.w_hh)
            .chain(&w.bias)
            .chain(&w.out_w)
            .chain(core::iter::once(&w.out_b));
        if !all.into_iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidModel("weights contain non-finite values".into()));
        }
        if !(w.train_rate > 0.0 && w.train_rate.is_finite()) {
            return Err(Error::InvalidModel(format!("invalid training rate {}", w.train_rate)));
        }
        Ok(Self {
            hidden_size: h,
            input_size: w.input_size,
            w_ih: Matrix::from_vec(gates, w.input_size, w.w_ih)?,
            w_hh: Matrix::from_vec(gates, h, w.w_hh)?,
            bias: w.bias,
            out_w: w.out_w,
            out_b: w.out_b,
            readout: w.readout,
            train_rate: w.train_rate,
            controls: vec![0.0; w.input_size - 1],
        })
    }

    /// Hold the conditioning inputs (channels after the audio channel) at
    /// fixed values.
    pub fn with_controls(mut self, controls: &[f64]) -> Result<Self> {
        check_len("controls", self.input_size - 1, controls.len())?;
        self.controls.copy_from_slice(controls);
        Ok(self)
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden_size
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn train_rate(&self) -> f64 {
        self.train_rate
    }

    pub fn readout_kind(&self) -> ReadoutKind {
        self.readout
    }

    pub fn w_ih(&self) -> &Matrix {
        &self.w_ih
    }

    pub fn w_hh(&self) -> &Matrix {
        &self.w_hh
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn out_w(&self) -> &[f64] {
        &self.out_w
    }

    pub fn out_b(&self) -> f64 {
        self.out_b
    }

    pub fn controls(&self) -> &[f64] {
        &self.controls
    }

    /// Gate pre-activation for gate row `row`.
    #[inline]
    fn preactivation(&self, row: usize, h_prev: &[f64], x: f64) -> f64 {
        let wi = self.w_ih.row(row);
        let mut z = self.bias[row] + wi[0] * x;
        for (w, c) in wi[1..].iter().zip(&self.controls) {
            z += w * c;
        }
        for (w, hv) in self.w_hh.row(row).iter().zip(h_prev) {
            z += w * hv;
        }
        z
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            what,
            expected,
            found,
        })
    }
}

impl RecurrentCell for RnnModel {
    fn state_dim(&self) -> usize {
        2 * self.hidden_size
    }

    fn step(&self, prev: &[f64], x: f64, next: &mut [f64]) {
        let n = self.hidden_size;
        let (h_prev, c_prev) = prev.split_at(n);
        let (h_next, c_next) = next.split_at_mut(n);
        for j in 0..n {
            let i = sigmoid(self.preactivation(j, h_prev, x));
            let f = sigmoid(self.preactivation(n + j, h_prev, x));
            let g = tanh(self.preactivation(2 * n + j, h_prev, x));
            let o = sigmoid(self.preactivation(3 * n + j, h_prev, x));
            let c = f * c_prev[j] + i * g;
            c_next[j] = c;
            h_next[j] = o * tanh(c);
        }
    }

    fn readout(&self, state: &[f64], x: f64) -> f64 {
        let h = &state[..self.hidden_size];
        let mut y = self.out_b;
        for (w, hv) in self.out_w.iter().zip(h) {
            y += w * hv;
        }
        match self.readout {
            ReadoutKind::HiddenOnly => y,
            ReadoutKind::Residual => y + x,
        }
    }

    fn jacobian(&self, state: &[f64]) -> Matrix {
        let n = self.hidden_size;
        let (h, c) = state.split_at(n);
        let mut jac = Matrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            let i = sigmoid(self.preactivation(j, h, 0.0));
            let f = sigmoid(self.preactivation(n + j, h, 0.0));
            let g = tanh(self.preactivation(2 * n + j, h, 0.0));
            let o = sigmoid(self.preactivation(3 * n + j, h, 0.0));
            let c_new = f * c[j] + i * g;
            let tc = tanh(c_new);
            let dtc = 1.0 - tc * tc;

            let di = i * (1.0 - i) * g;
            let df = f * (1.0 - f) * c[j];
            let dg = i * (1.0 - g * g);
            let do_ = o * (1.0 - o) * tc;
            let wi = self.w_hh.row(j);
            let wf = self.w_hh.row(n + j);
            let wg = self.w_hh.row(2 * n + j);
            let wo = self.w_hh.row(3 * n + j);
            for m in 0..n {
                let dc_dh = df * wf[m] + di * wi[m] + dg * wg[m];
                jac[(n + j, m)] = dc_dh;
                jac[(j, m)] = do_ * wo[m] + o * dtc * dc_dh;
            }
            jac[(n + j, n + j)] = f;
            jac[(j, n + j)] = o * dtc * f;
        }
        jac
    }
}

/// Checked single LSTM step on a packed state `[h; c]`.
pub fn lstm_step(model: &RnnModel, prev: &[f64], x: f64) -> Result<Vec<f64>> {
    check_len("packed state", model.state_dim(), prev.len())?;
    let mut next = vec![0.0; prev.len()];
    model.step(prev, x, &mut next);
    Ok(next)
}

/// Checked readout from a hidden vector `h` (not the packed state).
pub fn readout(model: &RnnModel, h: &[f64], x: f64) -> Result<f64> {
    check_len("hidden vector", model.hidden_size(), h.len())?;
    let mut packed = vec![0.0; model.state_dim()];
    packed[..h.len()].copy_from_slice(h);
    Ok(model.readout(&packed, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn zero_weights(h: usize) -> LstmWeights {
        LstmWeights {
            hidden_size: h,
            input_size: 1,
            w_ih: vec![0.0; 4 * h],
            w_hh: vec![0.0; 4 * h * h],
            bias: vec![0.0; 4 * h],
            out_w: vec![0.0; h],
            out_b: 0.0,
            readout: ReadoutKind::HiddenOnly,
            train_rate: 44100.0,
        }
    }

    #[test]
    fn zero_weights_zero_state_stay_zero() {
        let m = RnnModel::new(zero_weights(3)).unwrap();
        let next = lstm_step(&m, &[0.0; 6], 0.0).unwrap();
        assert_eq!(next, vec![0.0; 6]);
    }

    #[test]
    fn closed_forget_gate_clears_cell() {
        let mut w = zero_weights(1);
        // gates (i, f, g, o): f bias strongly negative, o driven by input
        w.bias[1] = -50.0;
        w.w_ih[3] = 40.0;
        let m = RnnModel::new(w).unwrap();
        let next = lstm_step(&m, &[0.0, 1.0], 1.0).unwrap();
        // i = 0.5, g = 0 so c_next = sigmoid(-50) * 1
        assert!(next[1].abs() < 1e-20);
        assert!(next[0].abs() < 1e-20);
    }

    #[test]
    fn constant_and_selector_readout() {
        let mut w = zero_weights(3);
        w.out_b = 0.3;
        let m = RnnModel::new(w.clone()).unwrap();
        assert_eq!(readout(&m, &[0.4, -2.0, 9.0], 0.7).unwrap(), 0.3);
        w.out_b = 0.0;
        w.out_w = vec![1.0, 0.0, 0.0];
        let m = RnnModel::new(w.clone()).unwrap();
        assert_eq!(readout(&m, &[1.0, 0.0, 0.0], 0.0).unwrap(), 1.0);
        w.readout = ReadoutKind::Residual;
        let m = RnnModel::new(w).unwrap();
        assert_eq!(readout(&m, &[1.0, 0.0, 0.0], 0.25).unwrap(), 1.25);
    }

    #[test]
    fn zero_weight_jacobian_blocks() {
        let m = RnnModel::new(zero_weights(2)).unwrap();
        let j = m.jacobian(&[0.0; 4]);
        let expect = [
            [0.0, 0.0, 0.25, 0.0],
            [0.0, 0.0, 0.0, 0.25],
            [0.0, 0.0, 0.5, 0.0],
            [0.0, 0.0, 0.0, 0.5],
        ];
        for (r, row) in expect.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert_eq!(j[(r, c)], v, "entry ({r},{c})");
            }
        }
    }

    #[test]
    fn validation_names_the_field() {
        let mut w = zero_weights(2);
        w.w_hh.pop();
        assert_eq!(
            RnnModel::new(w).unwrap_err(),
            Error::ShapeMismatch {
                what: "w_hh",
                expected: 16,
                found: 15
            }
        );
        let mut w = zero_weights(2);
        w.bias[0] = f64::NAN;
        assert!(RnnModel::new(w).is_err());
        let m = RnnModel::new(zero_weights(2)).unwrap();
        assert!(lstm_step(&m, &[0.0; 3], 0.0).is_err());
    }

    #[test]
    fn controls_feed_extra_inputs() {
        let mut w = zero_weights(1);
        w.input_size = 2;
        w.w_ih = vec![0.0; 8];
        // cell gate driven by the control channel
        w.w_ih[2 * 2 + 1] = 1.0;
        let m = RnnModel::new(w).unwrap().with_controls(&[0.8]).unwrap();
        let next = lstm_step(&m, &[0.0, 0.0], 0.0).unwrap();
        let c = 0.5 * 0.8f64.tanh();
        assert!((next[1] - c).abs() < 1e-15);
        assert!((next[0] - 0.5 * c.tanh()).abs() < 1e-15);
    }
}
