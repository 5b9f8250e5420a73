//! File formats, resampling, the experiment harness and the command line
//! around `srirnn-core`.

pub mod cli;
mod error;
pub mod experiment;
pub mod model_file;
pub mod report;
pub mod resample;
pub mod ringdown;
pub mod wav;

pub use error::{Error, Result};
