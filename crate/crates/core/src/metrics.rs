//! Signal-to-noise ratio, experiment records and the stability/success
//! contingency table.

use alloc::string::String;
use alloc::vec::Vec;

use crate::filters::{DesignMethod, Ratio};
use crate::math::log10;
use crate::{Error, Result};

/// Samples dropped from the start of both signals before comparing.
pub const DEFAULT_TRUNCATION: usize = 44_100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrResult {
    /// Reference energy over error energy.
    pub linear: f64,
    /// `+inf` for a perfect match, `-inf` when the test signal is non-finite.
    pub db: f64,
    /// Samples compared after truncation.
    pub samples: usize,
    pub truncated: usize,
}

/// `sum y_ref^2 / sum (y_test - y_ref)^2` after dropping the first
/// `truncate` samples of both.
pub fn snr(y_test: &[f64], y_ref: &[f64], truncate: usize) -> Result<SnrResult> {
    if y_test.len() != y_ref.len() {
        return Err(Error::LengthMismatch {
            left: y_test.len(),
            right: y_ref.len(),
        });
    }
    if y_ref.len() <= truncate {
        return Err(Error::TooShort {
            len: y_ref.len(),
            truncate,
        });
    }
    let test = &y_test[truncate..];
    let reference = &y_ref[truncate..];
    if let Some(index) = reference.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput {
            index: index + truncate,
        });
    }
    let signal: f64 = reference.iter().map(|v| v * v).sum();
    if signal == 0.0 {
        return Err(Error::ZeroReference);
    }
    let samples = reference.len();
    if !test.iter().all(|v| v.is_finite()) {
        return Ok(SnrResult {
            linear: 0.0,
            db: f64::NEG_INFINITY,
            samples,
            truncated: truncate,
        });
    }
    let noise: f64 = test.iter().zip(reference).map(|(a, b)| (a - b) * (a - b)).sum();
    let linear = signal / noise;
    let db = if noise == 0.0 { f64::INFINITY } else { 10.0 * log10(linear) };
    Ok(SnrResult {
        linear,
        db,
        samples,
        truncated: truncate,
    })
}

/// One (model, ratio, filter) evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub model: String,
    pub ratio: Ratio,
    pub method: DesignMethod,
    pub order: usize,
    pub snr_db: f64,
    /// Same case with no filter in the loop.
    pub naive_snr_db: f64,
    pub rho: f64,
    /// `None` when the analysis was indeterminate.
    pub predicted_stable: Option<bool>,
}

impl ExperimentRecord {
    /// Strict SNR improvement over the naive run.
    pub fn success(&self) -> bool {
        self.snr_db > self.naive_snr_db
    }
}

/// Stability prediction against empirical success.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ContingencyTable {
    pub stable_success: usize,
    pub stable_failure: usize,
    pub unstable_success: usize,
    pub unstable_failure: usize,
    /// Records without a prediction, kept out of the four cells.
    pub indeterminate: usize,
}

impl ContingencyTable {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ExperimentRecord>) -> Self {
        let mut t = Self::default();
        for r in records {
            t.add(r);
        }
        t
    }

    pub fn add(&mut self, r: &ExperimentRecord) {
        let cell = match (r.predicted_stable, r.success()) {
            (None, _) => &mut self.indeterminate,
            (Some(true), true) => &mut self.stable_success,
            (Some(true), false) => &mut self.stable_failure,
            (Some(false), true) => &mut self.unstable_success,
            (Some(false), false) => &mut self.unstable_failure,
        };
        *cell += 1;
    }

    /// Sum of the four cells.
    pub fn total(&self) -> usize {
        self.stable_success + self.stable_failure + self.unstable_success + self.unstable_failure
    }

    /// `(stable & success + unstable & failure) / total`; NaN when empty.
    pub fn agreement(&self) -> f64 {
        (self.stable_success + self.unstable_failure) as f64 / self.total() as f64
    }
}

/// SNR distribution of one filter design across models.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSummary {
    pub method: DesignMethod,
    pub order: usize,
    pub count: usize,
    /// Records with a non-finite SNR, excluded from the statistics below.
    pub non_finite: usize,
    pub min_db: f64,
    pub mean_db: f64,
    pub max_db: f64,
    /// Share of records beating the naive run.
    pub success_rate: f64,
}

/// Per-filter summaries in order of first appearance.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<FilterSummary> {
    let mut keys: Vec<(DesignMethod, usize)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.method, r.order)) {
            keys.push((r.method, r.order));
        }
    }
    keys.into_iter()
        .map(|(method, order)| {
            let group: Vec<&ExperimentRecord> =
                records.iter().filter(|r| r.method == method && r.order == order).collect();
            let finite: Vec<f64> = group.iter().map(|r| r.snr_db).filter(|v| v.is_finite()).collect();
            let n = finite.len();
            let (min_db, mean_db, max_db) = if n == 0 {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                (
                    finite.iter().copied().fold(f64::INFINITY, f64::min),
                    finite.iter().sum::<f64>() / n as f64,
                    finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                )
            };
            let wins = group.iter().filter(|r| r.success()).count();
            FilterSummary {
                method,
                order,
                count: group.len(),
                non_finite: group.len() - n,
                min_db,
                mean_db,
                max_db,
                success_rate: wins as f64 / group.len() as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(stable: Option<bool>, snr: f64, naive: f64) -> ExperimentRecord {
        ExperimentRecord {
            model: "m".into(),
            ratio: Ratio::new(160, 147).unwrap(),
            method: DesignMethod::Lagrange,
            order: 1,
            snr_db: snr,
            naive_snr_db: naive,
            rho: 0.5,
            predicted_stable: stable,
        }
    }

    #[test]
    fn identical_signals_are_infinite() {
        let y = [1.0, -2.0, 3.0];
        let r = snr(&y, &y, 1).unwrap();
        assert_eq!(r.db, f64::INFINITY);
        assert_eq!(r.samples, 2);
    }

    #[test]
    fn zero_output_is_zero_db() {
        let r = snr(&[0.0; 4], &[1.0, 2.0, -1.0, 0.5], 0).unwrap();
        assert_eq!(r.linear, 1.0);
        assert_eq!(r.db, 0.0);
    }

    #[test]
    fn non_finite_output_is_minus_infinity() {
        let r = snr(&[0.0, f64::NAN], &[1.0, 1.0], 0).unwrap();
        assert_eq!(r.db, f64::NEG_INFINITY);
    }

    #[test]
    fn errors() {
        assert_eq!(snr(&[1.0], &[1.0, 2.0], 0), Err(Error::LengthMismatch { left: 1, right: 2 }));
        assert_eq!(snr(&[1.0], &[1.0], 1), Err(Error::TooShort { len: 1, truncate: 1 }));
        assert_eq!(snr(&[1.0, 1.0], &[5.0, 0.0], 1), Err(Error::ZeroReference));
    }

    #[test]
    fn table_cells_and_agreement() {
        let recs = [
            record(Some(true), 30.0, 20.0),
            record(Some(true), 10.0, 20.0),
            record(Some(false), f64::NEG_INFINITY, 20.0),
            record(Some(false), f64::NEG_INFINITY, 20.0),
            record(None, 25.0, 20.0),
        ];
        let t = ContingencyTable::from_records(&recs);
        assert_eq!((t.stable_success, t.stable_failure, t.unstable_success, t.unstable_failure), (1, 1, 0, 2));
        assert_eq!(t.indeterminate, 1);
        assert_eq!(t.total(), 4);
        assert_eq!(t.agreement(), 0.75);
    }

    #[test]
    fn equal_snr_is_not_success() {
        assert!(!record(Some(true), 20.0, 20.0).success());
    }

    #[test]
    fn summary_skips_non_finite() {
        let recs = [record(Some(true), 30.0, 20.0), record(Some(true), 10.0, 20.0), record(Some(false), f64::NEG_INFINITY, 20.0)];
        let s = summarize(&recs);
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].count, s[0].non_finite), (3, 1));
        assert_eq!((s[0].min_db, s[0].mean_db, s[0].max_db), (10.0, 20.0, 30.0));
        assert!((s[0].success_rate - 1.0 / 3.0).abs() < 1e-15);
    }
}
