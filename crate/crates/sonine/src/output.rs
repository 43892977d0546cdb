//! CSV and JSON writers.
//!
//! CSV floats carry 17 significant digits; JSON floats use the shortest
//! representation that parses back to the same value. Non-finite values are
//! written as `null` in JSON.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use sonine_core::pde::{decay_check, majorant_check};
use sonine_core::{ScalarTrace, SolveReport, SolveStatus, TraceStatus};

/// Version of every JSON document written by this crate.
pub const SCHEMA_VERSION: u32 = 1;

pub const REPORT_HEADER: [&str; 7] = ["step", "t", "l2_norm", "range_min", "range_max", "decay_bound", "majorant_W"];

pub const TRACE_HEADER: [&str; 4] = ["step", "t", "value", "status"];

/// `x` with 17 significant digits; round-trips through `parse::<f64>`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn csv_writer(path: &Path) -> io::Result<csv::Writer<fs::File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(csv::Writer::from_path(path)?)
}

pub fn write_report_csv(report: &SolveReport, path: &Path) -> io::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(REPORT_HEADER)?;
    for (n, &t) in report.times.iter().enumerate() {
        w.write_record([
            n.to_string(),
            fmt_f64(t),
            fmt_f64(report.l2_norms[n]),
            fmt_f64(report.range_min[n]),
            fmt_f64(report.range_max[n]),
            fmt_f64(report.decay_bound[n]),
            fmt_f64(report.majorant_w[n]),
        ])?;
    }
    w.flush()
}

pub fn trace_status_label(status: &TraceStatus) -> &'static str {
    match status {
        TraceStatus::Completed => "Completed",
        TraceStatus::BlowUp { .. } => "BlowUp",
        TraceStatus::Failed { .. } => "Failed",
    }
}

/// One row per node; the status column is `ok` except on the last row, which
/// carries the final status.
pub fn write_trace_csv(trace: &ScalarTrace, path: &Path) -> io::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(TRACE_HEADER)?;
    let last = trace.times.len().saturating_sub(1);
    for (n, (&t, &v)) in trace.times.iter().zip(&trace.values).enumerate() {
        let status = if n == last { trace_status_label(&trace.status) } else { "ok" };
        w.write_record([n.to_string(), fmt_f64(t), fmt_f64(v), status.to_string()])?;
    }
    w.flush()
}

/// Writes a CSV with the given header and rows of floats.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt_f64(*v)))?;
    }
    w.flush()
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    fs::write(path, text + "\n")
}

pub fn serialize_f64<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

pub fn serialize_opt_f64<S: serde::Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize_f64(v, s),
        None => s.serialize_none(),
    }
}

pub fn serialize_vec_f64<S: serde::Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        if x.is_finite() {
            seq.serialize_element(x)?;
        } else {
            seq.serialize_element(&Option::<f64>::None)?;
        }
    }
    seq.end()
}

/// `summary.json` of a `solve` run.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SolveSummary {
    pub schema_version: u32,
    pub status: &'static str,
    #[serde(serialize_with = "serialize_opt_f64")]
    pub bracket_low: Option<f64>,
    #[serde(serialize_with = "serialize_opt_f64")]
    pub bracket_high: Option<f64>,
    pub failure_reason: Option<&'static str>,
    pub steps: usize,
    #[serde(serialize_with = "serialize_f64")]
    pub final_time: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub u0_norm: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub coercivity_constant: f64,
    pub decay_violations: Option<usize>,
    #[serde(serialize_with = "serialize_opt_f64")]
    pub decay_max_excess: Option<f64>,
    pub majorant_pass: Option<bool>,
    #[serde(serialize_with = "serialize_opt_f64")]
    pub majorant_max_gap: Option<f64>,
    pub config_sha256: String,
}

impl SolveSummary {
    pub fn new(report: &SolveReport, config_sha256: String) -> Self {
        let (status, lo, hi, reason) = match report.status {
            SolveStatus::Completed => ("Completed", None, None, None),
            SolveStatus::BlowUp { t_low, t_high } => ("BlowUp", Some(t_low), Some(t_high), None),
            SolveStatus::Failed { reason, .. } => ("Failed", None, None, Some(reason)),
        };
        let decay = decay_check(report, 1e-3).ok().filter(|d| !d.skipped);
        let maj = majorant_check(report).ok().filter(|_| report.is_completed());
        Self {
            schema_version: SCHEMA_VERSION,
            status,
            bracket_low: lo,
            bracket_high: hi,
            failure_reason: reason,
            steps: report.times.len().saturating_sub(1),
            final_time: report.times.last().copied().unwrap_or(0.0),
            u0_norm: report.u0_norm,
            coercivity_constant: report.coercivity_constant,
            decay_violations: decay.map(|d| d.violations),
            decay_max_excess: decay.map(|d| d.max_excess),
            majorant_pass: maj.map(|m| m.pass),
            majorant_max_gap: maj.map(|m| m.max_gap_violation),
            config_sha256,
        }
    }
}
