//! Machine-readable command reports.
//!
//! Keys are emitted in sorted order, so identical runs give byte-identical
//! output.

use coherence_core::channels::{KrausMap, SchurMatrix};
use coherence_core::classify::ClassificationReport;
use coherence_core::convert::ConversionVerdict;
use coherence_core::{ComplexMatrix, C64};
use serde_json::{json, Map, Value};

use crate::document::{Document, MatrixData};

#[derive(Debug, Clone)]
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, inputs: Value, tolerance: f64, paper_anchor: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), json!(command));
        fields.insert("inputs".into(), inputs);
        fields.insert("tolerance".into(), json!(tolerance));
        fields.insert("paper_anchor".into(), json!(paper_anchor));
        Self { fields }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.fields.insert("seed".into(), json!(seed));
        self
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn render(&self) -> String {
        serde_json::to_string_pretty(&self.fields).expect("reports always serialize") + "\n"
    }
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixData::from_matrix(m)).expect("matrix data serializes")
}

pub fn channel(m: &KrausMap) -> Value {
    serde_json::to_value(Document::from_kraus(m)).expect("documents serialize")
}

pub fn schur(a: &SchurMatrix) -> Value {
    serde_json::to_value(Document::from_schur(a)).expect("documents serialize")
}

pub fn flags(r: &ClassificationReport) -> Value {
    json!({
        "io": r.io,
        "gi": r.gi,
        "sgi": r.sgi,
        "fi": r.fi,
        "sio": r.sio,
        "mio": r.mio,
        "dio": r.dio,
        "tio": r.tio,
        "trace_preserving": r.trace_preserving,
    })
}

pub fn verdict(v: &ConversionVerdict) -> Value {
    json!({
        "possible": v.possible,
        "probability": v.probability,
        "reason": v.reason.map(|r| r.as_str()),
        "conclusive": v.conclusive,
        "map": v.map.as_ref().map(channel),
    })
}
