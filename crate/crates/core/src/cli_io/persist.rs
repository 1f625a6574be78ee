use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::experiments::ExperimentReport;

pub const SCHEMA_VERSION: u64 = 1;

/// Long-form trajectory rows, one per `(t, n)`.
pub const TRAJECTORY_HEADER: &str = "t,n,re_c,im_c";
/// Scalar diagnostics in long form.
pub const DIAGNOSTIC_HEADER: &str = "t,metric,value";
/// One row per scanned parameter.
pub const REPORT_HEADER: &str = "param,error,slope_window";

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[derive(Serialize)]
struct EnvelopeOut<'a> {
    schema_version: u64,
    report: &'a ExperimentReport,
}

#[derive(Deserialize)]
struct EnvelopeIn {
    schema_version: u64,
    report: serde_json::Value,
}

pub fn report_to_json(report: &ExperimentReport) -> Result<String> {
    report.validate()?;
    let mut text = serde_json::to_string_pretty(&EnvelopeOut {
        schema_version: SCHEMA_VERSION,
        report,
    })
    .map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn report_from_json(text: &str) -> Result<ExperimentReport> {
    let env: EnvelopeIn = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if env.schema_version != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found: env.schema_version,
            expected: SCHEMA_VERSION,
        });
    }
    let report: ExperimentReport = serde_json::from_value(env.report).map_err(|e| Error::Format(e.to_string()))?;
    report.validate()?;
    Ok(report)
}

/// Serializes `report` as versioned JSON; NaN or negative metrics are rejected
/// before anything touches the disk.
pub fn write_report(path: &Path, report: &ExperimentReport) -> Result<()> {
    write_atomic(path, report_to_json(report)?.as_bytes())
}

pub fn read_report(path: &Path) -> Result<ExperimentReport> {
    report_from_json(&std::fs::read_to_string(path)?)
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for (t, state) in traj.times.iter().zip(&traj.states) {
        for n in state.grid().indices() {
            let c = state.coeff(n);
            let _ = writeln!(out, "{t:e},{n},{:e},{:e}", c.re, c.im);
        }
    }
    out
}

pub fn diagnostics_csv<'a>(rows: impl IntoIterator<Item = (f64, &'a str, f64)>) -> String {
    let mut out = String::from(DIAGNOSTIC_HEADER);
    out.push('\n');
    for (t, metric, value) in rows {
        let _ = writeln!(out, "{t:e},{metric},{value:e}");
    }
    out
}

/// `param,error,slope_window` rows for `metric`; the slope column is the
/// log-log slope from the previous row, empty where undefined.
pub fn report_csv(report: &ExperimentReport, metric: &str) -> Result<String> {
    let values = report.metric(metric)?;
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for (i, (p, e)) in report.params.iter().zip(values).enumerate() {
        let slope = if i > 0 {
            let (p0, e0) = (report.params[i - 1], values[i - 1]);
            let s = (e / e0).ln() / (p / p0).ln();
            if s.is_finite() {
                format!("{s:e}")
            } else {
                String::new()
            }
        } else {
            String::new()
        };
        let _ = writeln!(out, "{p:e},{e:e},{slope}");
    }
    Ok(out)
}

/// `PASS`, `FAIL: <criteria>` or `NONE` when nothing was asserted.
pub fn verdict_line(report: &ExperimentReport) -> String {
    if report.verdicts.is_empty() {
        return "NONE\n".into();
    }
    let failed: Vec<&str> = report
        .verdicts
        .iter()
        .filter(|v| !v.passed)
        .map(|v| v.criterion.as_str())
        .collect();
    if failed.is_empty() {
        "PASS\n".into()
    } else {
        format!("FAIL: {}\n", failed.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{Check, Criterion, Provenance};

    fn report() -> ExperimentReport {
        let mut r = ExperimentReport::new("t", "N", vec![1.0, 2.0, 4.0], Provenance::new(3, serde_json::json!({})));
        r.metrics.insert("error".into(), vec![1.0, 0.25, 0.0625]);
        r.slopes.insert("error".into(), -2.0);
        r.criteria.push(Criterion::new(
            "small",
            Check::MaxAtMost {
                metric: "error".into(),
                bound: 0.5,
            },
        ));
        r.finalize().unwrap()
    }

    #[test]
    fn report_rows_and_local_slopes() {
        let csv = report_csv(&report(), "error").unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], REPORT_HEADER);
        assert_eq!(lines[1], "1e0,1e0,");
        assert_eq!(lines[2], "2e0,2.5e-1,-2e0");
        assert_eq!(verdict_line(&report()), "FAIL: small\n");
    }

    #[test]
    fn schema_mismatch() {
        let text = report_to_json(&report()).unwrap().replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(
            report_from_json(&text),
            Err(Error::SchemaVersion { found: 2, expected: 1 })
        ));
    }
}
