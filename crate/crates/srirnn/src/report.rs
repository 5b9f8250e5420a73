//! CSV and JSON report writers.
//!
//! Floats are written with 17 significant digits in exponent form, which
//! round-trips every `f64`. JSON objects have sorted keys. Non-finite values
//! are written as the strings `inf`, `-inf` and `nan`.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Number, Value};
use srirnn_core::analysis::StabilityReport;
use srirnn_core::filters::{FirCoefficients, FrequencyResponse};
use srirnn_core::metrics::{ContingencyTable, ExperimentRecord, FilterSummary};
use srirnn_core::Complex64;

use crate::experiment::{FilterSpec, Skipped};
use crate::{Error, Result};

pub const RECORD_COLUMNS: [&str; 9] =
    ["model", "ratio", "method", "order", "snr_db", "naive_snr_db", "success", "rho", "predicted_stable"];

/// 17 significant digits, or `inf` / `-inf` / `nan`.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(format_f64(x).parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::String(format_f64(x))
    }
}

fn json_list(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json_f64(x)).collect())
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialise");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    std::fs::write(path, to_json_string(v)).map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Usage(format!("{}: {other:?}", path.display())),
    })
}

fn finish<W: Write>(mut w: csv::Writer<W>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_records_csv(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        w.write_record([
            r.model.clone(),
            r.ratio.to_string(),
            r.method.name().to_string(),
            r.order.to_string(),
            format_f64(r.snr_db),
            format_f64(r.naive_snr_db),
            r.success().to_string(),
            format_f64(r.rho),
            match r.predicted_stable {
                Some(s) => s.to_string(),
                None => "indeterminate".into(),
            },
        ])?;
    }
    finish(w, path)
}

/// One row per (model, ratio), one SNR column per filter.
pub fn write_violin_csv(path: &Path, records: &[ExperimentRecord], filters: &[FilterSpec]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["model".to_string(), "ratio".to_string()];
    header.extend(filters.iter().map(FilterSpec::label));
    w.write_record(&header)?;
    let mut rows: Vec<(String, String)> = Vec::new();
    for r in records {
        let key = (r.model.clone(), r.ratio.to_string());
        if !rows.contains(&key) {
            rows.push(key);
        }
    }
    for (model, ratio) in rows {
        let mut row = vec![model.clone(), ratio.clone()];
        for f in filters {
            let hit = records.iter().find(|r| {
                r.model == model && r.ratio.to_string() == ratio && r.method == f.method && r.order == f.order
            });
            row.push(hit.map(|r| format_f64(r.snr_db)).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    finish(w, path)
}

pub fn write_poles_csv(path: &Path, poles: &[Complex64]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["re", "im", "abs"])?;
    for z in poles {
        w.write_record([format_f64(z.re), format_f64(z.im), format_f64(z.norm())])?;
    }
    finish(w, path)
}

pub fn write_response_csv(path: &Path, r: &FrequencyResponse) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["omega", "magnitude", "phase_delay_error"])?;
    for i in 0..r.omega.len() {
        w.write_record([format_f64(r.omega[i]), format_f64(r.magnitude[i]), format_f64(r.phase_delay_error[i])])?;
    }
    finish(w, path)
}

/// Rows `(frame, bin, dB)`.
pub fn write_spectrogram_csv(path: &Path, rows: &[(usize, usize, f64)]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["frame", "bin", "db"])?;
    for &(frame, bin, db) in rows {
        w.write_record([frame.to_string(), bin.to_string(), format_f64(db)])?;
    }
    finish(w, path)
}

pub fn filter_json(filter: &FirCoefficients, ratio: &str, objective: f64, extra: Map<String, Value>) -> Value {
    let mut m = Map::new();
    m.insert("ratio".into(), json!(ratio));
    m.insert("delta".into(), json_f64(filter.delta()));
    m.insert("method".into(), json!(filter.method().name()));
    m.insert("order".into(), json!(filter.order()));
    m.insert("taps".into(), json_list(filter.taps()));
    m.insert("objective".into(), json_f64(objective));
    m.extend(extra);
    Value::Object(m)
}

pub fn stability_json(report: &StabilityReport) -> Value {
    let resonances: Vec<Value> = report
        .resonances
        .iter()
        .map(|r| {
            json!({
                "angle": json_f64(r.angle),
                "frequency_hz": json_f64(r.frequency_hz),
                "magnitude": json_f64(r.pole.norm()),
            })
        })
        .collect();
    let residual = report.fixed_point.as_ref().map(|p| json_f64(p.residual)).unwrap_or(Value::Null);
    json!({
        "verdict": report.verdict.name(),
        "stable": report.stable,
        "spectral_radius": json_f64(report.spectral_radius),
        "margin": json_f64(report.margin),
        "pole_count": report.poles.len(),
        "pole_method": match report.method {
            srirnn_core::analysis::PoleMethod::Dense => "dense",
            srirnn_core::analysis::PoleMethod::Structured => "structured",
        },
        "low_confidence": report.low_confidence,
        "fixed_point_residual": residual,
        "resonances": resonances,
    })
}

pub fn summary_json(s: &FilterSummary) -> Value {
    json!({
        "method": s.method.name(),
        "order": s.order,
        "count": s.count,
        "non_finite": s.non_finite,
        "min_db": json_f64(s.min_db),
        "mean_db": json_f64(s.mean_db),
        "max_db": json_f64(s.max_db),
        "success_rate": json_f64(s.success_rate),
    })
}

pub fn contingency_json(t: &ContingencyTable, summaries: &[FilterSummary], skipped: &[Skipped]) -> Value {
    json!({
        "stable_success": t.stable_success,
        "stable_failure": t.stable_failure,
        "unstable_success": t.unstable_success,
        "unstable_failure": t.unstable_failure,
        "indeterminate": t.indeterminate,
        "total": t.total(),
        "agreement": json_f64(t.agreement()),
        "filters": summaries.iter().map(summary_json).collect::<Vec<_>>(),
        "skipped_models": skipped.iter().map(|s| json!({"path": s.path.display().to_string(), "reason": s.reason})).collect::<Vec<_>>(),
    })
}
