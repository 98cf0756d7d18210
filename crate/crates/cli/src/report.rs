//! Report records and their JSON and CSV projections.
//!
//! Every number is written with 17 significant digits in exponent form
//! (`1.0000000000000001e-1`, `6.0000000000000000e+0`), the same
//! text in both projections. Non-finite values are `null` in JSON and `NaN`,
//! `inf` or `-inf` in CSV.

use apapr_core::classify::{BasicClass, ClassificationReport};
use apapr_core::evaluate::PointEvaluation;
use apapr_core::tensor::TensorValue;
use serde_json::{Map, Number, Value};
use std::str::FromStr;

pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        let s = format!("{v:.16e}");
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn num(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(
            Number::from_str(&format_number(v)).expect("formatted float is a JSON number"),
        )
    } else {
        Value::Null
    }
}

fn nums(values: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(values.into_iter().map(num).collect())
}

/// Nested arrays `[i][j]...` of a tensor's components.
fn nested(t: &TensorValue) -> Value {
    fn go(t: &TensorValue, prefix: &mut Vec<usize>) -> Value {
        if prefix.len() == t.rank() {
            return num(t.get(prefix));
        }
        Value::Array(
            (0..t.dim())
                .map(|i| {
                    prefix.push(i);
                    let v = go(t, prefix);
                    prefix.pop();
                    v
                })
                .collect(),
        )
    }
    go(t, &mut Vec::new())
}

/// Flattened components in row-major index order with their suffixes.
fn flat(t: &TensorValue) -> Vec<(String, f64)> {
    let (n, r) = (t.dim(), t.rank());
    (0..n.pow(r as u32))
        .map(|k| {
            let idx: Vec<usize> = (0..r).rev().map(|s| k / n.pow(s as u32) % n).collect();
            (idx.iter().map(|i| i.to_string()).collect(), t.get(&idx))
        })
        .collect()
}

pub fn membership(c: &ClassificationReport) -> Vec<String> {
    c.membership.iter().map(|k| k.to_string()).collect()
}

fn class_norms(c: &ClassificationReport) -> Value {
    let mut m = Map::new();
    for class in BasicClass::ALL {
        m.insert(class.to_string(), num(c.norm(class)));
    }
    Value::Object(m)
}

/// A table of rows with a fixed header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is UTF-8")
    }
}

/// Builds a record as ordered (column, JSON value, CSV text) triples so the
/// two projections cannot drift apart.
#[derive(Default)]
struct Record {
    json: Map<String, Value>,
    columns: Vec<(String, String)>,
}

impl Record {
    fn scalar(&mut self, name: &str, v: f64) {
        self.json.insert(name.into(), num(v));
        self.columns.push((name.into(), format_number(v)));
    }

    fn index(&mut self, i: usize) {
        self.json.insert("index".into(), Value::from(i));
        self.columns.push(("index".into(), i.to_string()));
    }

    fn point(&mut self, p: [f64; 3]) {
        for (name, v) in ["t", "x", "y"].into_iter().zip(p) {
            self.scalar(name, v);
        }
    }

    fn vector(&mut self, name: &str, v: &[f64]) {
        self.json.insert(name.into(), nums(v.iter().copied()));
        for (i, x) in v.iter().enumerate() {
            self.columns
                .push((format!("{name}_{i}"), format_number(*x)));
        }
    }

    fn tensor(&mut self, name: &str, column: &str, t: &TensorValue) {
        self.json.insert(name.into(), nested(t));
        for (suffix, v) in flat(t) {
            self.columns
                .push((format!("{column}_{suffix}"), format_number(v)));
        }
    }

    fn classes(&mut self, c: &ClassificationReport) {
        self.json.insert("class_norms".into(), class_norms(c));
        for class in BasicClass::ALL {
            self.columns
                .push((format!("norm_{class}"), format_number(c.norm(class))));
        }
        self.scalar("f_norm", c.f_norm);
        self.scalar("threshold", c.threshold);
        self.scalar("decomposition_residual", c.residual);
        let names = membership(c);
        self.columns.push(("membership".into(), names.join(" ")));
        self.json.insert("membership".into(), Value::from(names));
    }
}

fn table(records: Vec<Record>) -> (Vec<Value>, Table) {
    let header = records
        .first()
        .map(|r| r.columns.iter().map(|(c, _)| c.clone()).collect())
        .unwrap_or_default();
    let mut rows = Vec::with_capacity(records.len());
    let mut json = Vec::with_capacity(records.len());
    for r in records {
        rows.push(r.columns.into_iter().map(|(_, v)| v).collect());
        json.push(Value::Object(r.json));
    }
    (json, Table { header, rows })
}

/// Full per-point records of `verify`.
pub fn verify_records(evals: &[PointEvaluation]) -> (Vec<Value>, Table) {
    let records = evals
        .iter()
        .enumerate()
        .map(|(i, ev)| {
            let mut r = Record::default();
            r.index(i);
            r.point(ev.point);
            r.scalar("structure_residual", ev.structure.max());
            r.scalar("tau", ev.scalar);
            r.scalar("tau_star", ev.scalar_star);
            r.scalar("k01", ev.k01);
            r.scalar("k02", ev.k02);
            r.scalar("k12", ev.k12);
            r.vector("theta", &ev.lee.theta);
            r.vector("theta_star", &ev.lee.theta_star);
            r.vector("omega", &ev.lee.omega);
            r.tensor("ricci", "rho", &ev.ricci_frame);
            r.tensor("ricci_star", "rho_star", &ev.ricci_star_frame);
            r.tensor("f", "F", &ev.f);
            r.tensor("riemann", "R", &ev.riemann_frame);
            r.classes(&ev.classification);
            r
        })
        .collect();
    table(records)
}

/// Curvature table of `curvature`.
pub fn curvature_records(evals: &[PointEvaluation]) -> (Vec<Value>, Table) {
    let records = evals
        .iter()
        .enumerate()
        .map(|(i, ev)| {
            let mut r = Record::default();
            r.index(i);
            r.point(ev.point);
            r.scalar("tau", ev.scalar);
            r.scalar("tau_star", ev.scalar_star);
            r.scalar("k12", ev.k12);
            r.scalar("k01", ev.k01);
            r.scalar("k02", ev.k02);
            r.tensor("ricci", "rho", &ev.ricci_frame);
            r
        })
        .collect();
    table(records)
}

/// Classification records of `classify`.
pub fn classify_records(
    points: &[[f64; 3]],
    reports: &[ClassificationReport],
) -> (Vec<Value>, Table) {
    let records = points
        .iter()
        .zip(reports)
        .enumerate()
        .map(|(i, (p, c))| {
            let mut r = Record::default();
            r.index(i);
            r.point(*p);
            r.classes(c);
            r
        })
        .collect();
    table(records)
}

/// Outcome of one check over all points.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: &'static str,
    pub statement: String,
    /// `true`: the largest residual must stay below the tolerance;
    /// `false`: it must exceed it (a property that has to be present).
    pub below: bool,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("id".into(), Value::from(self.id));
        m.insert("statement".into(), Value::from(self.statement.clone()));
        m.insert(
            "relation".into(),
            Value::from(if self.below { "<" } else { ">" }),
        );
        m.insert("max_residual".into(), num(self.value));
        m.insert("tolerance".into(), num(self.tolerance));
        m.insert("pass".into(), Value::from(self.pass));
        Value::Object(m)
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {} (max {} {} {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.statement,
            format_number(self.value),
            if self.below { "<" } else { ">" },
            format_number(self.tolerance)
        )
    }
}

/// Serializes with two-space indentation and a trailing newline.
pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
