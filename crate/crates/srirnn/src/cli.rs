//! Command-line front end. Every verb prints JSON or writes files; errors are
//! reported on stderr as one JSON object and a nonzero exit status.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use srirnn_core::analysis::{predict_stability, AnalysisOptions, PoleMethod, StabilityReport};
use srirnn_core::filters::{
    band_error, frequency_response, lagrange_coeffs, minimax_coeffs, DesignMethod, FirCoefficients, MinimaxOptions,
    Ratio,
};
use srirnn_core::model::{process_adjusted, process_native, RnnModel};

use crate::experiment::{batch_experiment, load_model_dir, parse_filter_list, EvalConfig};
use crate::model_file::load_model;
use crate::report::{self, json_f64, to_json_string};
use crate::resample::{dft_resample_detailed, trim_to_multiple};
use crate::ringdown::{ringdown, stft_db, HOP, WINDOW};
use crate::wav::{read_wav, write_wav, AudioBuffer};
use crate::{Error, Result};

/// Length of the synthetic test signal used when `evaluate` has no input.
const SYNTHETIC_SECONDS: usize = 3;
const RINGDOWN_SETTLE: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "srirnn", version, about = "Run recurrent audio models at other sample rates")]
pub struct Cli {
    /// Seed for generated test signals.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for `evaluate` (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Log progress to stderr; repeat for more detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Naive,
    Lagrange,
    Minimax,
}

impl From<Method> for DesignMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Naive => DesignMethod::Identity,
            Method::Lagrange => DesignMethod::Lagrange,
            Method::Minimax => DesignMethod::Minimax,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Poles {
    Dense,
    Structured,
}

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    #[arg(long, value_enum, default_value_t = Method::Lagrange)]
    pub method: Method,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    /// Minimax band edge as a fraction of the sample rate.
    #[arg(long, default_value_t = 0.25)]
    pub band: f64,
    /// Minimax frequency grid size.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

impl DesignArgs {
    fn minimax(&self) -> MinimaxOptions {
        MinimaxOptions {
            band_fraction: self.band,
            grid_size: self.grid,
            ..MinimaxOptions::default()
        }
    }

    /// Taps plus the in-band error they achieve.
    fn design(&self, ratio: Ratio) -> Result<(FirCoefficients, f64)> {
        let delta = ratio.delta();
        let opts = self.minimax();
        let filter = match self.method {
            Method::Naive => FirCoefficients::identity(delta),
            Method::Lagrange => lagrange_coeffs(delta, self.order)?,
            Method::Minimax => minimax_coeffs(delta, self.order, &opts)?.coefficients,
        };
        let objective = band_error(filter.taps(), delta, opts.band_fraction, opts.grid_size);
        Ok((filter, objective))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a model over a WAV file at the file's sample rate.
    Process {
        #[arg(long)]
        model: PathBuf,
        input: PathBuf,
        output: PathBuf,
        /// Inference/training rate ratio; defaults to the file rate over the
        /// model's training rate.
        #[arg(long)]
        ratio: Option<Ratio>,
        #[command(flatten)]
        design: DesignArgs,
    },
    /// Design a delay filter and print it as JSON.
    DesignFilter {
        #[arg(long)]
        ratio: Ratio,
        #[command(flatten)]
        design: DesignArgs,
        /// Write (omega, magnitude, phase_delay_error) rows here.
        #[arg(long)]
        response: Option<PathBuf>,
        /// Points in the response table.
        #[arg(long, default_value_t = 512)]
        response_points: usize,
    },
    /// Band-limited resampling of a WAV file by P/Q.
    Resample {
        #[arg(long)]
        ratio: Ratio,
        input: PathBuf,
        output: PathBuf,
    },
    /// Linearised stability analysis of a model with a delay filter.
    Analyze {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        ratio: Ratio,
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long, value_enum, default_value_t = Poles::Dense)]
        poles: Poles,
        /// Write (re, im, abs) rows here.
        #[arg(long)]
        emit_poles: Option<PathBuf>,
        /// Run the zero-input ringdown and write its spectrogram here.
        #[arg(long)]
        emit_ringdown: Option<PathBuf>,
        /// Samples to run after the filter is switched in.
        #[arg(long, default_value_t = 88_200)]
        ringdown_len: usize,
    },
    /// Batch experiment over a directory of models.
    Evaluate {
        #[arg(long)]
        models: PathBuf,
        /// Test signal at the training rate; a seeded noise signal if absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "160/147,147/160")]
        ratios: Vec<Ratio>,
        #[arg(long, default_value = "lagrange:1-5,minimax:1-5")]
        filters: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        contingency: Option<PathBuf>,
        /// Per-(model, ratio) SNR columns, one per filter.
        #[arg(long)]
        violin: Option<PathBuf>,
        /// Samples dropped before scoring.
        #[arg(long, default_value_t = srirnn_core::metrics::DEFAULT_TRUNCATION)]
        truncate: usize,
        #[arg(long, value_enum, default_value_t = Poles::Dense)]
        poles: Poles,
    },
}

fn pole_method(p: Poles) -> PoleMethod {
    match p {
        Poles::Dense => PoleMethod::Dense,
        Poles::Structured => PoleMethod::Structured,
    }
}

fn print_json(v: &Value) {
    print!("{}", to_json_string(v));
}

/// Noise in `[-0.5, 0.5)`.
pub fn synthetic_signal(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random::<f64>() - 0.5).collect()
}

fn rate_ratio(file_rate: u32, train_rate: f64) -> Result<Ratio> {
    let q = train_rate.round();
    if q != train_rate || q < 1.0 {
        return Err(Error::Usage(format!("training rate {train_rate} is not a whole number of Hz; pass --ratio")));
    }
    Ok(Ratio::new(file_rate as i64, q as i64)?)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Process { model, input, output, ratio, design } => {
            let loaded = load_model(&model)?;
            let audio = read_wav(&input)?;
            let ratio = match ratio {
                Some(r) => r,
                None => rate_ratio(audio.sample_rate, loaded.model.train_rate())?,
            };
            let y = if ratio == Ratio::identity() {
                process_native(&loaded.model, &audio.samples)?
            } else {
                let (filter, _) = design.design(ratio)?;
                process_adjusted(&loaded.model, &audio.samples, filter.taps())?
            };
            let out = AudioBuffer { samples: y, ..audio };
            write_wav(&output, &out, out.format)
        }
        Command::DesignFilter { ratio, design, response, response_points } => {
            let (filter, objective) = design.design(ratio)?;
            if let Some(path) = response {
                report::write_response_csv(&path, &frequency_response(&filter, response_points)?)?;
            }
            let mut extra = Map::new();
            extra.insert("band".into(), json_f64(design.band));
            extra.insert("grid".into(), json!(design.grid));
            print_json(&report::filter_json(&filter, &ratio.to_string(), objective, extra));
            Ok(())
        }
        Command::Resample { ratio, input, output } => {
            let audio = read_wav(&input)?;
            let rate = audio.sample_rate as u64 * ratio.p();
            if !rate.is_multiple_of(ratio.q()) {
                return Err(Error::Usage(format!("{} Hz times {ratio} is not a whole rate", audio.sample_rate)));
            }
            let x = trim_to_multiple(&audio.samples, ratio.q());
            if x.len() < audio.samples.len() {
                log::warn!("dropping {} trailing samples to fit {ratio}", audio.samples.len() - x.len());
            }
            let r = dft_resample_detailed(x, ratio)?;
            log::info!("imaginary residue {:e}", r.imag_residue);
            let sample_rate = u32::try_from(rate / ratio.q()).map_err(|_| Error::Usage("output rate too large".into()))?;
            let out = AudioBuffer { samples: r.samples, sample_rate, format: audio.format };
            write_wav(&output, &out, out.format)
        }
        Command::Analyze { model, ratio, design, poles, emit_poles, emit_ringdown, ringdown_len } => {
            let loaded = load_model(&model)?;
            let (filter, objective) = design.design(ratio)?;
            let config = EvalConfig {
                pole_method: pole_method(poles),
                minimax: design.minimax(),
                ..EvalConfig::default()
            };
            let report = analysis_only(&loaded.model, ratio, filter.taps(), &config)?;
            if let Some(path) = emit_poles {
                report::write_poles_csv(&path, &report.poles)?;
            }
            let mut out = report::stability_json(&report);
            let obj = out.as_object_mut().expect("report is an object");
            obj.insert("model".into(), json!(loaded.id));
            obj.insert("filter".into(), report::filter_json(&filter, &ratio.to_string(), objective, Map::new()));
            if let Some(path) = emit_ringdown {
                let r = ringdown(&loaded.model, filter.taps(), RINGDOWN_SETTLE, ringdown_len)?;
                report::write_spectrogram_csv(&path, &stft_db(&r.output, WINDOW, HOP))?;
                obj.insert(
                    "ringdown".into(),
                    json!({
                        "settle": RINGDOWN_SETTLE,
                        "samples": r.output.len(),
                        "diverged_at": r.diverged_at,
                    }),
                );
            }
            print_json(&out);
            Ok(())
        }
        Command::Evaluate { models, input, ratios, filters, out, contingency, violin, truncate, poles } => {
            let filters = parse_filter_list(&filters)?;
            let (loaded, skipped) = load_model_dir(&models)?;
            if loaded.is_empty() {
                return Err(Error::NoModels(models));
            }
            let x = match input {
                Some(path) => {
                    let audio = read_wav(&path)?;
                    if let Some(m) = loaded.iter().find(|m| m.model.train_rate() != audio.sample_rate as f64) {
                        log::warn!("{} is {} Hz but {} was trained at {} Hz", path.display(), audio.sample_rate, m.id, m.model.train_rate());
                    }
                    audio.samples
                }
                None => {
                    let rate = loaded[0].model.train_rate() as usize;
                    synthetic_signal(cli.seed, SYNTHETIC_SECONDS * rate)
                }
            };
            let config = EvalConfig {
                truncate,
                pole_method: pole_method(poles),
                ..EvalConfig::default()
            };
            let outcome = batch_experiment(&loaded, &x, &ratios, &filters, &config, cli.threads)?;
            report::write_records_csv(&out, &outcome.records)?;
            if let Some(path) = violin {
                report::write_violin_csv(&path, &outcome.records, &filters)?;
            }
            let mut all_skipped = skipped;
            all_skipped.extend(outcome.failed);
            let table = report::contingency_json(&outcome.table, &outcome.summaries, &all_skipped);
            if let Some(path) = contingency {
                report::write_json(&path, &table)?;
            }
            print_json(&table);
            Ok(())
        }
    }
}

fn analysis_only(model: &RnnModel, ratio: Ratio, taps: &[f64], config: &EvalConfig) -> Result<StabilityReport> {
    let opts = AnalysisOptions {
        run_len: config.run_len,
        avg_len: config.avg_len,
        method: config.pole_method,
        inference_rate: model.train_rate() * ratio.as_f64(),
    };
    Ok(predict_stability(model, taps, &opts)?)
}

/// Diagnostic object written to stderr on failure.
pub fn error_json(e: &Error) -> String {
    serde_json::to_string(&json!({"error": e.kind(), "message": e.to_string()})).expect("values serialise")
}
