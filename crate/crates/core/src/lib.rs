//! Run pre-trained LSTM audio-effect models at sample rates other than the
//! one they were trained at.
//!
//! The recurrent state is fed back through a short FIR filter that
//! approximates a fractional delay (oversampling) or a fractional advance
//! (undersampling) of the state trajectory. The crate designs those filters
//! ([`filters`]), runs the modified recursion ([`model`]) and predicts from a
//! linearisation around a zero-input fixed point whether a given filter will
//! destabilise a given model ([`analysis`]).
//!
//! Everything here is pure computation on `f64` with heap allocation only;
//! file formats, resampling and the command line live in the `srirnn` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
mod error;
pub mod filters;
pub mod linalg;
pub(crate) mod math;
pub mod metrics;
pub mod model;

pub use error::{Error, Result};
pub use num_complex::Complex64;
