//! Plain-text formats: CSV tables and versioned JSON documents.
//!
//! Numbers are written with 12 significant digits so that repeated runs are
//! byte-identical.

use std::io::Read;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::calibrate::ScanResult;
use crate::error::{Error, Result};
use crate::marginals::{DiscretePmf, MarginalSpec};
use crate::sklar::JointPmf;

pub const FORMAT_VERSION: u32 = 1;

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        // no "-0"
        "0".into()
    } else {
        format!("{r}")
    }
}

/// Rounds every float inside a JSON value in place.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                let r = round_sig(x);
                let r = if r == 0.0 { 0.0 } else { r };
                if let Some(num) = serde_json::Number::from_f64(r) {
                    *n = num;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Serializes `body` as pretty JSON with `format_version` first and every
/// float rounded.
pub fn to_versioned_json<T: Serialize>(body: &T) -> Result<String> {
    let mut value = serde_json::to_value(body)?;
    round_json(&mut value);
    let mut doc = serde_json::Map::new();
    doc.insert("format_version".into(), Value::from(FORMAT_VERSION));
    match value {
        Value::Object(map) => doc.extend(map),
        other => {
            doc.insert("data".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc))?;
    s.push('\n');
    Ok(s)
}

// ---------------------------------------------------------------------------
// PMFs

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfDocument {
    pub n: usize,
    pub probs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<MarginalSpec>,
}

impl PmfDocument {
    pub fn new(pmf: &DiscretePmf, spec: Option<MarginalSpec>) -> Self {
        PmfDocument {
            n: pmf.n(),
            probs: pmf.probs().to_vec(),
            spec,
        }
    }

    pub fn into_pmf(self) -> Result<DiscretePmf> {
        if self.probs.len() != self.n {
            return Err(Error::Shape(format!(
                "{} probabilities for n = {}",
                self.probs.len(),
                self.n
            )));
        }
        normalize_near_unit(&self.probs).and_then(|w| DiscretePmf::from_weights(&w))
    }
}

/// Accepts text-rounded masses that sum to one within `1e-6`.
fn normalize_near_unit(w: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidDistribution(format!(
            "masses sum to {total}, expected 1"
        )));
    }
    Ok(w.to_vec())
}

pub fn pmf_to_csv(pmf: &DiscretePmf) -> String {
    let mut s = String::from("j,prob\n");
    for (k, p) in pmf.probs().iter().enumerate() {
        s.push_str(&format!("{},{}\n", k + 1, fmt_num(*p)));
    }
    s
}

fn read_rows<R: Read>(source: R) -> Result<Vec<(u64, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let fields: Vec<String> = rec.iter().map(str::to_owned).collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push((line, fields));
    }
    Ok(rows)
}

fn is_header(fields: &[String]) -> bool {
    fields.iter().any(|f| f.parse::<f64>().is_err())
}

fn parse_index(line: u64, s: &str) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(Error::Parse {
            line,
            message: format!("expected a positive integer, found {s:?}"),
        }),
    }
}

fn parse_value(line: u64, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a number, found {s:?}"),
    })
}

/// Reads `j,value` rows (probabilities or counts); values are normalized.
/// Support is `1..=max j`, absent rows count as zero.
pub fn read_pmf_csv<R: Read>(source: R) -> Result<DiscretePmf> {
    let rows = read_rows(source)?;
    let mut cells = Vec::new();
    for (k, (line, fields)) in rows.iter().enumerate() {
        if k == 0 && is_header(fields) {
            continue;
        }
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: *line,
                message: format!("expected 2 columns, found {}", fields.len()),
            });
        }
        cells.push((
            parse_index(*line, &fields[0])?,
            parse_value(*line, &fields[1])?,
        ));
    }
    let n = cells.iter().map(|c| c.0).max().ok_or(Error::EmptyInput)?;
    let mut w = vec![0.0; n];
    for (j, x) in cells {
        w[j - 1] += x;
    }
    DiscretePmf::from_weights(&w)
}

/// Reads positive integers, one per line.
pub fn read_sample<R: Read>(source: R) -> Result<Vec<usize>> {
    let rows = read_rows(source)?;
    let mut out = Vec::new();
    for (k, (line, fields)) in rows.iter().enumerate() {
        if k == 0 && is_header(fields) {
            continue;
        }
        out.push(parse_index(*line, &fields[0])?);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Joints

pub fn joint_to_csv(joint: &JointPmf) -> String {
    let mut s = String::from("i,j,mass\n");
    for i in 1..=joint.n_in() {
        for j in 1..=joint.n_out() {
            s.push_str(&format!("{i},{j},{}\n", fmt_num(joint.get(i, j))));
        }
    }
    s
}

/// Reads `i,j,mass` triples; the grid is `[1..max i] x [1..max j]`.
pub fn read_joint_csv<R: Read>(source: R) -> Result<JointPmf> {
    let rows = read_rows(source)?;
    let mut cells = Vec::new();
    for (k, (line, fields)) in rows.iter().enumerate() {
        if k == 0 && is_header(fields) {
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: *line,
                message: format!("expected 3 columns, found {}", fields.len()),
            });
        }
        cells.push((
            parse_index(*line, &fields[0])?,
            parse_index(*line, &fields[1])?,
            parse_value(*line, &fields[2])?,
        ));
    }
    let n_in = cells.iter().map(|c| c.0).max().ok_or(Error::EmptyInput)?;
    let n_out = cells.iter().map(|c| c.1).max().ok_or(Error::EmptyInput)?;
    let mut w = vec![0.0; n_in * n_out];
    for (i, j, m) in cells {
        w[(i - 1) * n_out + (j - 1)] += m;
    }
    let w = normalize_near_unit(&w)?;
    JointPmf::from_weights(n_in, n_out, &w)
}

pub fn read_joint_json(text: &str) -> Result<JointPmf> {
    let mut value: Value = serde_json::from_str(text)?;
    if let Value::Object(map) = &mut value {
        map.remove("format_version");
    }
    // renormalize text-rounded masses before validation
    #[derive(Deserialize)]
    struct Raw {
        n_in: usize,
        n_out: usize,
        mass: Vec<Vec<f64>>,
    }
    let raw: Raw = serde_json::from_value(value)?;
    if raw.mass.len() != raw.n_in || raw.mass.iter().any(|r| r.len() != raw.n_out) {
        return Err(Error::Shape("mass rows do not match n_in x n_out".into()));
    }
    let w = normalize_near_unit(&raw.mass.concat())?;
    JointPmf::from_weights(raw.n_in, raw.n_out, &w)
}

pub fn read_pmf_json(text: &str) -> Result<DiscretePmf> {
    let mut value: Value = serde_json::from_str(text)?;
    if let Value::Object(map) = &mut value {
        map.remove("format_version");
    }
    serde_json::from_value::<PmfDocument>(value)?.into_pmf()
}

// ---------------------------------------------------------------------------
// Scans

pub fn scan_to_csv(scan: &ScanResult) -> String {
    let mut s = scan.axes.join(",");
    s.push(',');
    s.push_str(&scan.value_label);
    s.push('\n');
    for row in &scan.rows {
        for p in &row.params {
            s.push_str(&fmt_num(*p));
            s.push(',');
        }
        s.push_str(&fmt_num(row.value));
        s.push('\n');
    }
    s
}
