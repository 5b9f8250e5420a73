use alloc::vec;
use alloc::vec::Vec;

use super::RecurrentCell;
use crate::linalg::Matrix;
use crate::{Error, Result};

/// Affine recurrence `s' = A s + b x + c` with readout `y = q . s + d x + e`.
///
/// Its linearisation is exact, which makes it the reference model for
/// checking the stability analysis and the adjusted inference loop against
/// closed-form transfer functions.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCell {
    transition: Matrix,
    input: Vec<f64>,
    offset: Vec<f64>,
    output: Vec<f64>,
    direct: f64,
    output_offset: f64,
}

impl LinearCell {
    pub fn new(transition: Matrix, input: Vec<f64>, offset: Vec<f64>, output: Vec<f64>) -> Result<Self> {
        let n = transition.rows();
        if !transition.is_square() {
            return Err(Error::ShapeMismatch {
                what: "transition columns",
                expected: n,
                found: transition.cols(),
            });
        }
        for (what, v) in [("input", &input), ("offset", &offset), ("output", &output)] {
            if v.len() != n {
                return Err(Error::ShapeMismatch {
                    what,
                    expected: n,
                    found: v.len(),
                });
            }
        }
        Ok(Self {
            transition,
            input,
            offset,
            output,
            direct: 0.0,
            output_offset: 0.0,
        })
    }

    /// `s' = a s + b x`, `y = s`.
    pub fn one_pole(a: f64, b: f64) -> Self {
        Self {
            transition: Matrix::diagonal(&[a]),
            input: vec![b],
            offset: vec![0.0],
            output: vec![1.0],
            direct: 0.0,
            output_offset: 0.0,
        }
    }

    pub fn with_direct(mut self, direct: f64, output_offset: f64) -> Self {
        self.direct = direct;
        self.output_offset = output_offset;
        self
    }

    pub fn transition(&self) -> &Matrix {
        &self.transition
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }
}

impl RecurrentCell for LinearCell {
    fn state_dim(&self) -> usize {
        self.transition.rows()
    }

    fn step(&self, prev: &[f64], x: f64, next: &mut [f64]) {
        for (i, out) in next.iter_mut().enumerate() {
            let mut acc = self.offset[i] + self.input[i] * x;
            for (a, s) in self.transition.row(i).iter().zip(prev) {
                acc += a * s;
            }
            *out = acc;
        }
    }

    fn readout(&self, state: &[f64], x: f64) -> f64 {
        let mut y = self.output_offset + self.direct * x;
        for (q, s) in self.output.iter().zip(state) {
            y += q * s;
        }
        y
    }

    fn jacobian(&self, _state: &[f64]) -> Matrix {
        self.transition.clone()
    }
}
