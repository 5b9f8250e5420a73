//! LSTM models stored as JSON with a `model_data` header and a PyTorch-style
//! `state_dict`.
//!
//! ```json
//! {
//!   "model_data": {"unit_type": "LSTM", "hidden_size": 40, "input_size": 1, "skip": 1},
//!   "state_dict": {
//!     "rec.weight_ih_l0": [[...], ...], "rec.weight_hh_l0": [[...], ...],
//!     "rec.bias_ih_l0": [...], "rec.bias_hh_l0": [...],
//!     "lin.weight": [[...]], "lin.bias": [...]
//!   }
//! }
//! ```
//!
//! Weight arrays may be flat or nested row-major. The two gate biases are
//! summed. A nonzero `skip` adds the audio input to the readout. Unknown keys
//! are ignored.

use std::path::Path;

use serde_json::{Map, Value};
use srirnn_core::model::{LstmWeights, ReadoutKind, RnnModel};

use crate::{Error, Result};

/// Training rate assumed when the file does not state one.
pub const DEFAULT_TRAIN_RATE: f64 = 44_100.0;

const RATE_KEYS: [&str; 3] = ["sample_rate", "samplerate", "sampling_rate"];

/// Layout details found while loading.
#[derive(Debug, Clone, PartialEq)]
pub struct ExporterVariant {
    /// Weight matrices were nested arrays rather than flat.
    pub nested: bool,
    pub readout: ReadoutKind,
    /// Key the training rate came from, if any.
    pub rate_key: Option<&'static str>,
}

#[derive(Debug, Clone)]
pub struct LoadedModel {
    /// File stem.
    pub id: String,
    pub model: RnnModel,
    pub variant: ExporterVariant,
}

pub fn load_model(path: impl AsRef<Path>) -> Result<LoadedModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let root: Value = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_model(&root, path).map(|(model, variant)| LoadedModel { id, model, variant })
}

/// Parse an already decoded document. `path` is only used in errors.
pub fn parse_model(root: &Value, path: &Path) -> Result<(RnnModel, ExporterVariant)> {
    let key_err = |key: &str, reason: String| Error::ModelKey {
        path: path.into(),
        key: key.into(),
        reason,
    };
    let object = |v: &'_ Value, key: &str| -> Result<Map<String, Value>> {
        v.get(key)
            .and_then(Value::as_object)
            .cloned()
            .ok_or_else(|| key_err(key, "missing or not an object".into()))
    };
    let data = object(root, "model_data")?;
    let dict = object(root, "state_dict")?;

    let unit = data
        .get("unit_type")
        .and_then(Value::as_str)
        .ok_or_else(|| key_err("model_data.unit_type", "missing or not a string".into()))?;
    if !unit.eq_ignore_ascii_case("lstm") {
        return Err(Error::UnsupportedUnit {
            path: path.into(),
            unit: unit.into(),
        });
    }
    let count = |key: &str| -> Result<usize> {
        let full = format!("model_data.{key}");
        data.get(key)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| key_err(&full, "missing or not a non-negative integer".into()))
    };
    let hidden = count("hidden_size")?;
    let inputs = count("input_size")?;
    if let Some(layers) = data.get("num_layers").and_then(Value::as_u64) {
        if layers != 1 {
            return Err(key_err("model_data.num_layers", format!("only single-layer models are supported, found {layers}")));
        }
    }
    let skip = data.get("skip").and_then(Value::as_u64).unwrap_or(0);
    let readout = if skip > 0 { ReadoutKind::Residual } else { ReadoutKind::HiddenOnly };
    let mut rate_key = None;
    let mut train_rate = DEFAULT_TRAIN_RATE;
    for key in RATE_KEYS {
        if let Some(v) = data.get(key).and_then(Value::as_f64) {
            train_rate = v;
            rate_key = Some(key);
            break;
        }
    }

    let mut nested = false;
    let mut array = |key: &str, expected: usize| -> Result<Vec<f64>> {
        let v = dict.get(key).ok_or_else(|| key_err(key, "missing".into()))?;
        let mut out = Vec::with_capacity(expected);
        flatten(v, &mut out, &mut nested).map_err(|reason| key_err(key, reason))?;
        if out.len() != expected {
            return Err(key_err(key, format!("expected {expected} values, found {}", out.len())));
        }
        Ok(out)
    };
    let gates = 4 * hidden;
    let w_ih = array("rec.weight_ih_l0", gates * inputs)?;
    let w_hh = array("rec.weight_hh_l0", gates * hidden)?;
    let b_ih = array("rec.bias_ih_l0", gates)?;
    let b_hh = array("rec.bias_hh_l0", gates)?;
    let out_w = array("lin.weight", hidden)?;
    let out_b = array("lin.bias", 1)?[0];
    let bias = b_ih.iter().zip(&b_hh).map(|(a, b)| a + b).collect();

    let model = RnnModel::new(LstmWeights {
        hidden_size: hidden,
        input_size: inputs,
        w_ih,
        w_hh,
        bias,
        out_w,
        out_b,
        readout,
        train_rate,
    })?;
    Ok((model, ExporterVariant { nested, readout, rate_key }))
}

fn flatten(v: &Value, out: &mut Vec<f64>, nested: &mut bool) -> std::result::Result<(), String> {
    match v {
        Value::Number(n) => {
            out.push(n.as_f64().ok_or("number out of range")?);
            Ok(())
        }
        Value::Array(items) => {
            for item in items {
                if item.is_array() {
                    *nested = true;
                }
                flatten(item, out, nested)?;
            }
            Ok(())
        }
        other => Err(format!("expected numbers, found {}", type_name(other))),
    }
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;
    use srirnn_core::model::RecurrentCell;

    fn fixture(hidden: usize) -> Value {
        let g = 4 * hidden;
        let rows = |r: usize, c: usize| -> Vec<Vec<f64>> {
            (0..r).map(|i| (0..c).map(|j| 0.01 * (i * c + j) as f64).collect()).collect()
        };
        json!({
            "model_data": {"model": "SimpleRNN", "unit_type": "LSTM", "hidden_size": hidden,
                           "input_size": 1, "skip": 1, "num_layers": 1, "epochs": 120},
            "state_dict": {
                "rec.weight_ih_l0": rows(g, 1),
                "rec.weight_hh_l0": rows(g, hidden),
                "rec.bias_ih_l0": vec![0.1; g],
                "rec.bias_hh_l0": vec![0.2; g],
                "lin.weight": rows(1, hidden),
                "lin.bias": [0.05]
            }
        })
    }

    fn parse(v: &Value) -> Result<(RnnModel, ExporterVariant)> {
        parse_model(v, Path::new("fixture.json"))
    }

    #[test]
    fn minimal_fixture_loads() {
        let (m, variant) = parse(&fixture(2)).unwrap();
        assert_eq!(m.hidden_size(), 2);
        assert_eq!(m.state_dim(), 4);
        assert_eq!(m.w_hh().rows(), 8);
        assert_eq!(m.w_hh()[(3, 1)], 0.07);
        assert!((m.bias()[0] - 0.3).abs() < 1e-15);
        assert_eq!(m.out_b(), 0.05);
        assert_eq!(m.train_rate(), DEFAULT_TRAIN_RATE);
        assert!(variant.nested);
        assert_eq!(variant.readout, ReadoutKind::Residual);
    }

    #[test]
    fn flat_arrays_and_rate() {
        let mut v = fixture(2);
        let flat: Vec<f64> = (0..16).map(|i| 0.01 * i as f64).collect();
        v["state_dict"]["rec.weight_hh_l0"] = json!(flat);
        v["state_dict"]["rec.weight_ih_l0"] = json!(vec![0.0; 8]);
        v["state_dict"]["lin.weight"] = json!([0.0, 1.0]);
        v["model_data"]["skip"] = json!(0);
        v["model_data"]["samplerate"] = json!(48000);
        let (m, variant) = parse(&v).unwrap();
        assert_eq!(m.w_hh()[(3, 1)], 0.07);
        assert_eq!(m.train_rate(), 48_000.0);
        assert_eq!(variant.rate_key, Some("samplerate"));
        assert_eq!(variant.readout, ReadoutKind::HiddenOnly);
    }

    #[test]
    fn gru_rejected() {
        let mut v = fixture(2);
        v["model_data"]["unit_type"] = json!("GRU");
        let e = parse(&v).unwrap_err();
        assert!(e.to_string().contains("unsupported unit_type"), "{e}");
    }

    #[test]
    fn truncated_array_names_key_and_length() {
        let mut v = fixture(3);
        v["state_dict"]["rec.bias_hh_l0"] = json!(vec![0.0; 11]);
        let e = parse(&v).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("rec.bias_hh_l0") && msg.contains("expected 12"), "{msg}");
    }

    #[test]
    fn missing_and_malformed_keys() {
        let mut v = fixture(2);
        v["state_dict"].as_object_mut().unwrap().remove("lin.bias");
        assert!(parse(&v).unwrap_err().to_string().contains("lin.bias"));
        let mut v = fixture(2);
        v["state_dict"]["lin.weight"] = json!(["a", "b"]);
        assert!(parse(&v).unwrap_err().to_string().contains("lin.weight"));
        let mut v = fixture(2);
        v["model_data"].as_object_mut().unwrap().remove("hidden_size");
        assert!(parse(&v).unwrap_err().to_string().contains("model_data.hidden_size"));
    }
}
