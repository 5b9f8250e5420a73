//! Per-case evaluation and the batch harness over a model library.
//!
//! A case runs the model at its training rate on `x`, resamples that output
//! to the new rate as the target, resamples `x` as the new input, and scores
//! the filtered model against the target. The unfiltered run at the new rate
//! is the naive baseline.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use srirnn_core::analysis::{find_fixed_point, stability_at, AnalysisOptions, FixedPoint, PoleMethod, StabilityReport};
use srirnn_core::filters::{lagrange_coeffs, minimax_coeffs, DesignMethod, FirCoefficients, MinimaxOptions, Ratio};
use srirnn_core::metrics::{snr, summarize, ContingencyTable, ExperimentRecord, FilterSummary, DEFAULT_TRUNCATION};
use srirnn_core::model::{process_adjusted, process_native, RecurrentCell};

use crate::model_file::{load_model, LoadedModel};
use crate::resample::{dft_resample, trim_to_multiple};
use crate::{Error, Result};

/// A filter design in a batch: method and order, designed per ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FilterSpec {
    pub method: DesignMethod,
    pub order: usize,
}

impl FilterSpec {
    pub fn label(&self) -> String {
        match self.method {
            DesignMethod::Identity => "naive".into(),
            m => format!("{}-{}", m.name(), self.order),
        }
    }

    pub fn design(&self, ratio: Ratio, minimax: &MinimaxOptions) -> Result<FirCoefficients> {
        let delta = ratio.delta();
        Ok(match self.method {
            DesignMethod::Identity => FirCoefficients::identity(delta),
            DesignMethod::Lagrange => lagrange_coeffs(delta, self.order)?,
            DesignMethod::Minimax => minimax_coeffs(delta, self.order, minimax)?.coefficients,
        })
    }
}

/// Parse `lagrange:1-5,minimax:2,naive`.
pub fn parse_filter_list(s: &str) -> Result<Vec<FilterSpec>> {
    let bad = || Error::FilterList(s.to_string());
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (name, orders) = item.split_once(':').unwrap_or((item, ""));
        let method: DesignMethod = name.parse().map_err(|_| bad())?;
        if method == DesignMethod::Identity {
            out.push(FilterSpec { method, order: 0 });
            continue;
        }
        let (lo, hi) = match orders.split_once('-') {
            Some((a, b)) => (a.parse::<usize>().map_err(|_| bad())?, b.parse::<usize>().map_err(|_| bad())?),
            None => {
                let k = orders.parse::<usize>().map_err(|_| bad())?;
                (k, k)
            }
        };
        if lo == 0 || lo > hi {
            return Err(bad());
        }
        out.extend((lo..=hi).map(|order| FilterSpec { method, order }));
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct EvalConfig {
    /// Samples dropped at the new rate before scoring.
    pub truncate: usize,
    pub run_len: usize,
    pub avg_len: usize,
    pub pole_method: PoleMethod,
    pub minimax: MinimaxOptions,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            truncate: DEFAULT_TRUNCATION,
            run_len: FixedPoint::DEFAULT_RUN,
            avg_len: FixedPoint::DEFAULT_AVERAGE,
            pole_method: PoleMethod::Dense,
            minimax: MinimaxOptions::default(),
        }
    }
}

/// Everything about a (model, ratio) pair that does not depend on the filter.
pub struct CaseContext<'a, C: ?Sized> {
    pub id: String,
    pub cell: &'a C,
    pub ratio: Ratio,
    pub inference_rate: f64,
    /// Input at the new rate.
    pub input: Vec<f64>,
    /// Native output resampled to the new rate.
    pub target: Vec<f64>,
    pub naive_snr_db: f64,
    /// `None` when the zero-input trajectory diverged.
    pub fixed_point: Option<FixedPoint>,
    config: EvalConfig,
}

impl<'a, C: RecurrentCell + ?Sized> CaseContext<'a, C> {
    pub fn prepare(
        id: impl Into<String>,
        cell: &'a C,
        train_rate: f64,
        x: &[f64],
        ratio: Ratio,
        config: &EvalConfig,
    ) -> Result<Self> {
        let id = id.into();
        let x = trim_to_multiple(x, ratio.q());
        let native = process_native(cell, x)?;
        let target = dft_resample(&native, ratio)?;
        let input = dft_resample(x, ratio)?;
        let fixed_point = match find_fixed_point(cell, config.run_len, config.avg_len) {
            Ok(p) => Some(p),
            Err(srirnn_core::Error::Diverged { index }) => {
                log::warn!("{id}: zero-input run diverged at sample {index}");
                None
            }
            Err(e) => return Err(e.into()),
        };
        let mut ctx = Self {
            id,
            cell,
            ratio,
            inference_rate: train_rate * ratio.as_f64(),
            input,
            target,
            naive_snr_db: f64::NAN,
            fixed_point,
            config: *config,
        };
        ctx.naive_snr_db = ctx.score(&[1.0])?;
        Ok(ctx)
    }

    /// SNR of the filtered run against the target; `-inf` on blow-up.
    pub fn score(&self, taps: &[f64]) -> Result<f64> {
        match process_adjusted(self.cell, &self.input, taps) {
            Ok(y) => Ok(snr(&y, &self.target, self.config.truncate)?.db),
            Err(srirnn_core::Error::NonFiniteState { .. }) => Ok(f64::NEG_INFINITY),
            Err(e) => Err(e.into()),
        }
    }

    pub fn stability(&self, taps: &[f64]) -> Result<StabilityReport> {
        let opts = AnalysisOptions {
            run_len: self.config.run_len,
            avg_len: self.config.avg_len,
            method: self.config.pole_method,
            inference_rate: self.inference_rate,
        };
        match &self.fixed_point {
            Some(p) => Ok(stability_at(self.cell, p.clone(), taps, &opts)?),
            None => Ok(StabilityReport::indeterminate(opts.method)),
        }
    }

    pub fn evaluate(&self, filter: &FirCoefficients) -> Result<ExperimentRecord> {
        let snr_db = self.score(filter.taps())?;
        let report = self.stability(filter.taps())?;
        let determinate = report.verdict != srirnn_core::analysis::Verdict::Indeterminate;
        Ok(ExperimentRecord {
            model: self.id.clone(),
            ratio: self.ratio,
            method: filter.method(),
            order: filter.order(),
            snr_db,
            naive_snr_db: self.naive_snr_db,
            rho: report.spectral_radius,
            predicted_stable: determinate.then_some(report.stable),
        })
    }
}

/// One (model, ratio, filter) case from scratch.
pub fn run_case<C: RecurrentCell + ?Sized>(
    id: &str,
    cell: &C,
    train_rate: f64,
    x: &[f64],
    ratio: Ratio,
    filter: &FirCoefficients,
    config: &EvalConfig,
) -> Result<ExperimentRecord> {
    CaseContext::prepare(id, cell, train_rate, x, ratio, config)?.evaluate(filter)
}

/// A model file that could not be used.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub path: PathBuf,
    pub reason: String,
}

/// Every `*.json` in `dir`, in file-name order. Unloadable files are
/// logged and returned as skipped.
pub fn load_model_dir(dir: &Path) -> Result<(Vec<LoadedModel>, Vec<Skipped>)> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("json")))
        .collect();
    paths.sort();
    let mut models = Vec::new();
    let mut skipped = Vec::new();
    for path in paths {
        match load_model(&path) {
            Ok(m) => models.push(m),
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                skipped.push(Skipped {
                    path,
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok((models, skipped))
}

#[derive(Debug, Clone)]
pub struct BatchOutcome {
    /// Model-major, then ratio, then filter, in input order.
    pub records: Vec<ExperimentRecord>,
    pub table: ContingencyTable,
    pub summaries: Vec<FilterSummary>,
    /// Cases that failed outright, in the same order.
    pub failed: Vec<Skipped>,
}

/// Full cross product of models, ratios and filters. `threads = None` uses
/// the global rayon pool. Results do not depend on the thread count.
pub fn batch_experiment(
    models: &[LoadedModel],
    x: &[f64],
    ratios: &[Ratio],
    filters: &[FilterSpec],
    config: &EvalConfig,
    threads: Option<usize>,
) -> Result<BatchOutcome> {
    if models.is_empty() {
        return Err(Error::NoModels(PathBuf::new()));
    }
    let filters: Vec<FilterSpec> = filters.iter().copied().filter(|f| f.method != DesignMethod::Identity).collect();
    let designs: Vec<Vec<FirCoefficients>> = ratios
        .iter()
        .map(|&r| filters.iter().map(|f| f.design(r, &config.minimax)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..models.len()).flat_map(|m| (0..ratios.len()).map(move |r| (m, r))).collect();
    let run = || -> Vec<std::result::Result<Vec<ExperimentRecord>, Skipped>> {
        jobs.par_iter()
            .map(|&(m, r)| {
                let model = &models[m];
                let fail = |e: Error| Skipped {
                    path: PathBuf::from(&model.id),
                    reason: format!("ratio {}: {e}", ratios[r]),
                };
                let ctx = CaseContext::prepare(&model.id, &model.model, model.model.train_rate(), x, ratios[r], config)
                    .map_err(fail)?;
                designs[r].iter().map(|f| ctx.evaluate(f).map_err(fail)).collect()
            })
            .collect()
    };
    let results = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Usage(e.to_string()))?
            .install(run),
        None => run(),
    };
    let mut records = Vec::new();
    let mut failed = Vec::new();
    for r in results {
        match r {
            Ok(rs) => records.extend(rs),
            Err(s) => {
                log::warn!("{}: {}", s.path.display(), s.reason);
                failed.push(s);
            }
        }
    }
    let table = ContingencyTable::from_records(&records);
    let summaries = summarize(&records);
    Ok(BatchOutcome {
        records,
        table,
        summaries,
        failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_lists() {
        let f = parse_filter_list("lagrange:1-3, minimax:5,naive").unwrap();
        assert_eq!(f.len(), 5);
        assert_eq!(f[2], FilterSpec { method: DesignMethod::Lagrange, order: 3 });
        assert_eq!(f[3].label(), "minimax-5");
        assert_eq!(f[4].label(), "naive");
        for bad in ["", "lagrange", "lagrange:0", "lagrange:3-1", "sinc:2"] {
            assert!(parse_filter_list(bad).is_err(), "{bad}");
        }
    }
}
