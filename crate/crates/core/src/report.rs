//! Tabular output rows shared by the CLI commands.

use std::io::Write;

use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::rational::{self, Rational};
use crate::series::io_csv_err;

pub fn serialize_rational<S: Serializer>(r: &Rational, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&rational::to_exact_string(r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Series,
    Enumeration,
    ClosedForm,
    ExactEngine,
    MonteCarlo,
    /// Soft checks whose outcome never affects the exit code.
    Diagnostic,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Series => "series",
            Provenance::Enumeration => "enumeration",
            Provenance::ClosedForm => "closed-form",
            Provenance::ExactEngine => "exact-engine",
            Provenance::MonteCarlo => "monte-carlo",
            Provenance::Diagnostic => "diagnostic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RowValue {
    Exact(String),
    Float(f64),
}

impl RowValue {
    pub fn exact(r: &Rational) -> Self {
        RowValue::Exact(rational::to_exact_string(r))
    }

    pub fn integer(v: impl ToString) -> Self {
        RowValue::Exact(v.to_string())
    }

    fn render(&self) -> String {
        match self {
            RowValue::Exact(s) => s.clone(),
            RowValue::Float(f) => format!("{f:e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub quantity: String,
    pub params: Vec<(String, String)>,
    pub value: RowValue,
    pub provenance: Provenance,
}

impl ReportRow {
    pub fn new(quantity: impl Into<String>, value: RowValue, provenance: Provenance) -> Self {
        Self { quantity: quantity.into(), params: Vec::new(), value, provenance }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }
}

/// Writes `quantity,<param keys...>,value,provenance`. The parameter columns
/// come from the first row; every row must carry the same keys.
pub fn write_rows_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let keys: Vec<String> = rows.first().map(|r| r.params.iter().map(|(k, _)| k.clone()).collect()).unwrap_or_default();
    let mut header = vec!["quantity".to_string()];
    header.extend(keys.iter().cloned());
    header.extend(["value".to_string(), "provenance".to_string()]);
    w.write_record(&header).map_err(io_csv_err)?;
    for r in rows {
        let mut rec = vec![r.quantity.clone()];
        for k in &keys {
            rec.push(r.params.iter().find(|(pk, _)| pk == k).map(|(_, v)| v.clone()).unwrap_or_default());
        }
        rec.push(r.value.render());
        rec.push(r.provenance.as_str().to_string());
        w.write_record(&rec).map_err(io_csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON objects with the parameters flattened next to `quantity`.
pub fn rows_json(rows: &[ReportRow]) -> serde_json::Value {
    let items = rows
        .iter()
        .map(|r| {
            let mut obj = serde_json::Map::new();
            obj.insert("quantity".into(), r.quantity.clone().into());
            for (k, v) in &r.params {
                obj.insert(k.clone(), v.clone().into());
            }
            obj.insert("value".into(), serde_json::to_value(&r.value).expect("plain value"));
            obj.insert("provenance".into(), r.provenance.as_str().into());
            serde_json::Value::Object(obj)
        })
        .collect();
    serde_json::Value::Array(items)
}
