//! Trajectory CSV, JSON reports and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};
use wongspin_core::dynamics::{spin_tensor, Charge, Spin};
use wongspin_core::grassmann::blade_label;
use wongspin_core::integrate::{DriftReport, Sample};
use wongspin_core::metric::PAIRS;
use wongspin_core::{GradedNumber, Model, Scalar};

use crate::error::Result;

/// Writes `bytes` to a temporary file next to `path` and renames it into place,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Scalars that can be written to reports.
pub trait Emit: Scalar {
    fn to_json(&self) -> Value;
}

impl Emit for f64 {
    fn to_json(&self) -> Value {
        json!(self)
    }
}

impl Emit for GradedNumber {
    /// Map from blade label (`""`, `"0"`, `"01"`, ...) to coefficient.
    fn to_json(&self) -> Value {
        let map: Map<String, Value> = self
            .coeffs()
            .iter()
            .enumerate()
            .map(|(mask, c)| (blade_label(mask), json!(c)))
            .collect();
        Value::Object(map)
    }
}

const SPIN_COLUMNS: [&str; 6] = ["S01", "S02", "S03", "S12", "S13", "S23"];

/// One row per sample: `s, x0..x3, v0..v3, S01..S23, Q1..Qn, C2, C3, casimir`.
/// Graded values are reduced to their body; `C3` is empty unless internal
/// coordinates are evolved.
pub fn trajectory_csv<T: Scalar>(samples: &[Sample<T>], model: &Model) -> Result<Vec<u8>> {
    let n = model.field.algebra().dim();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = vec!["s".into()];
    header.extend((0..4).map(|i| format!("x{i}")));
    header.extend((0..4).map(|i| format!("v{i}")));
    header.extend(SPIN_COLUMNS.iter().map(|s| s.to_string()));
    header.extend((1..=n).map(|a| format!("Q{a}")));
    header.extend(["C2", "C3", "casimir"].map(String::from));
    w.write_record(&header).map_err(csv_err)?;

    for sample in samples {
        let p = &sample.phase;
        let spin = spin_tensor(p);
        let mut row: Vec<String> = vec![sample.s.to_string()];
        row.extend(p.x.iter().map(|c| c.body().to_string()));
        row.extend(p.v.iter().map(|c| c.body().to_string()));
        row.extend(
            PAIRS
                .iter()
                .map(|&(mu, nu)| spin[mu][nu].body().to_string()),
        );
        row.extend(model.charges(p).iter().map(|q| q.body().to_string()));
        let c = &sample.conserved;
        row.push(c.c2.body().to_string());
        row.push(
            c.c3.as_ref()
                .map(|v| v.body().to_string())
                .unwrap_or_default(),
        );
        row.push(c.casimir.body().to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| crate::error::CliError::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> crate::error::CliError {
    crate::error::CliError::Io(e.to_string())
}

fn list<T: Emit>(values: &[T]) -> Value {
    Value::Array(values.iter().map(Emit::to_json).collect())
}

/// Every coefficient of every sample.
pub fn trajectory_json<T: Emit>(samples: &[Sample<T>], model: &Model) -> Value {
    let rows: Vec<Value> = samples
        .iter()
        .map(|sample| {
            let p = &sample.phase;
            let mut row = Map::new();
            row.insert("s".into(), json!(sample.s));
            row.insert("x".into(), list(&p.x));
            row.insert("v".into(), list(&p.v));
            match &p.charge {
                Charge::Internal { re, im } => {
                    row.insert("q_re".into(), list(re));
                    row.insert("q_im".into(), list(im));
                }
                Charge::Direct(_) => {}
            }
            row.insert("Q".into(), list(&model.charges(p)));
            if let Spin::Odd(xi) = &p.spin {
                row.insert("xi".into(), list(xi));
            }
            let spin = spin_tensor(p);
            let s: Map<String, Value> = PAIRS
                .iter()
                .zip(SPIN_COLUMNS)
                .map(|(&(mu, nu), name)| (name.to_string(), spin[mu][nu].to_json()))
                .collect();
            row.insert("S".into(), Value::Object(s));
            let c = &sample.conserved;
            row.insert(
                "C1".into(),
                c.c1.as_ref().map_or(Value::Null, Emit::to_json),
            );
            row.insert("C2".into(), c.c2.to_json());
            row.insert(
                "C3".into(),
                c.c3.as_ref().map_or(Value::Null, Emit::to_json),
            );
            row.insert("casimir".into(), c.casimir.to_json());
            Value::Object(row)
        })
        .collect();
    let n_gen = samples
        .first()
        .map(|s| s.phase.x[0].width().trailing_zeros())
        .unwrap_or(0);
    json!({ "n_gen": n_gen, "samples": rows })
}

/// `{invariant: {initial, max_abs, max_rel}}`; `max_rel` is null when the
/// initial value vanishes.
pub fn drift_json(report: &DriftReport) -> Value {
    let map: Map<String, Value> = report
        .entries()
        .into_iter()
        .map(|(name, d)| {
            (
                name.to_string(),
                json!({ "initial": d.initial, "max_abs": d.max_abs, "max_rel": d.max_rel() }),
            )
        })
        .collect();
    Value::Object(map)
}
