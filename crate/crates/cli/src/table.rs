use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use privwit::qcore::Tolerances;

/// Provenance written in front of every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub command: String,
    pub version: &'static str,
    pub scenario_hash: String,
    pub tolerances: Tolerances,
}

impl Metadata {
    fn comment_line(&self) -> String {
        let t = &self.tolerances;
        format!(
            "# privwit {} command={} scenario_sha256={} tol_herm={} tol_trace={} tol_psd={} tol_ssa={} tol_cptp={}",
            self.version,
            self.command,
            self.scenario_hash,
            fmt_num(t.herm),
            fmt_num(t.trace),
            fmt_num(t.psd),
            fmt_num(t.ssa),
            fmt_num(t.cptp),
        )
    }
}

/// Rectangular numeric table with free-form trailing comment lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub metadata: Metadata,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub notes: Vec<String>,
    /// Extra JSON payload (reports, summaries).
    pub extra: Option<Value>,
}

impl ResultTable {
    pub fn new(metadata: Metadata, columns: &[&str]) -> Self {
        Self {
            metadata,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
            extra: None,
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.metadata.comment_line();
        out.push('\n');
        for n in &self.notes {
            let _ = writeln!(out, "# {n}");
        }
        out.push_str(&self.columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|&v| fmt_num(v)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|&v| json_num(v)).collect()))
            .collect();
        let mut doc = json!({
            "metadata": self.metadata,
            "columns": self.columns,
            "rows": rows,
        });
        if !self.notes.is_empty() {
            doc["notes"] = json!(self.notes);
        }
        if let Some(extra) = &self.extra {
            doc["report"] = extra.clone();
        }
        doc
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// 12 significant digits, trailing zeros trimmed; `inf`, `-inf`, `nan` for
/// non-finite values.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim_zeros(&format!("{:.*}", (11 - exp) as usize, v))
    } else {
        format!("{}e{exp}", trim_zeros(mant))
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// A JSON number rounded like [`fmt_num`]; non-finite values become the
/// same string tokens as in CSV.
pub fn json_num(v: f64) -> Value {
    if v.is_finite() {
        let r: f64 = fmt_num(v).parse().expect("round trip");
        // avoid "-0.0"
        json!(if r == 0.0 { 0.0 } else { r })
    } else {
        Value::String(fmt_num(v))
    }
}
