//! JSON run reports. One object per run, fixed keys, floats written with 17
//! significant digits (non-finite values become `null`).

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::crossval::CrossvalReport;
use crate::lab::{Status, Witness};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn raw(v: f64) -> Option<Box<RawValue>> {
    v.is_finite()
        .then(|| RawValue::from_string(format!("{v:.16e}")).expect("formatted float is valid JSON"))
}

/// Serialize an `f64` with 17 significant digits.
pub fn float<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    match raw(*v) {
        Some(r) => r.serialize(s),
        None => s.serialize_none(),
    }
}

pub fn opt_float<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => float(v, s),
        None => s.serialize_none(),
    }
}

pub fn floats<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&raw(*x))?;
    }
    seq.end()
}

/// A report for one CLI invocation. Every key is always present.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    /// Arguments after the program name, as given.
    pub command: Vec<String>,
    #[serde(serialize_with = "opt_float")]
    pub value: Option<f64>,
    pub verdict: Option<Status>,
    pub method: Option<String>,
    pub case_label: Option<String>,
    #[serde(serialize_with = "opt_float")]
    pub beta: Option<f64>,
    #[serde(serialize_with = "opt_float")]
    pub gamma_second_derivative_min: Option<f64>,
    pub witness: Option<Witness>,
    pub samples_used: Option<u64>,
    pub seed: Option<u64>,
    /// Wall time; left `null` unless requested so that reports stay reproducible.
    pub elapsed_ms: Option<u64>,
    pub crossval: Option<CrossvalReport>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            command,
            value: None,
            verdict: None,
            method: None,
            case_label: None,
            beta: None,
            gamma_second_derivative_min: None,
            witness: None,
            samples_used: None,
            seed: None,
            elapsed_ms: None,
            crossval: None,
        }
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_17_digits() {
        let mut r = RunReport::new(vec!["eval".into()]);
        r.value = Some(7.0 / 3.0);
        r.beta = Some(f64::NAN);
        let json = r.to_json().unwrap();
        assert!(json.contains("\"value\": 2.3333333333333335e0"), "{json}");
        assert!(json.contains("\"beta\": null"));
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["value"].as_f64().unwrap(), 7.0 / 3.0);
    }

    #[test]
    fn all_keys_present() {
        let json = RunReport::new(vec![]).to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in [
            "schema_version",
            "tool_version",
            "command",
            "value",
            "verdict",
            "method",
            "case_label",
            "beta",
            "gamma_second_derivative_min",
            "witness",
            "samples_used",
            "seed",
            "elapsed_ms",
            "crossval",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn witness_floats_round_trip() {
        let mut r = RunReport::new(vec![]);
        r.witness = Some(Witness {
            x: vec![0.1, 1.0 / 3.0],
            y: vec![2.0, f64::INFINITY],
            margin: 1e-7,
            lambda: None,
        });
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(v["witness"]["x"][1].as_f64().unwrap(), 1.0 / 3.0);
        assert!(v["witness"]["y"][1].is_null());
        assert!(v["witness"].get("lambda").is_none());
    }
}
