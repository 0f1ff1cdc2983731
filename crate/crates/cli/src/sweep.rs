//! Parallel batch runs: one report file per job plus a summary table.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::Value;

use crate::config::{JobConfig, Overrides, UsageError};
use crate::pipeline::{key_verdicts, max_delta, run, Outcome};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub job: usize,
    pub name: String,
    pub exit_code: i32,
    pub bounded: String,
    pub compact: String,
    pub power_bounded: String,
    pub mean_ergodic: String,
    pub uniformly_ergodic: String,
    pub max_delta: Option<f64>,
    pub error: String,
    pub report_file: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    pub summary_file: PathBuf,
    /// Largest exit code over the jobs.
    pub exit_code: i32,
}

/// Accepts a JSON array of job configs or an object `{"jobs": [...]}`.
pub fn parse_jobs(text: &str) -> Result<Vec<Value>, UsageError> {
    let v: Value = serde_json::from_str(text).map_err(|e| UsageError(format!("invalid sweep file: {e}")))?;
    let jobs = match v {
        Value::Array(a) => a,
        Value::Object(mut m) if m.len() == 1 && m.contains_key("jobs") => match m.remove("jobs") {
            Some(Value::Array(a)) => a,
            _ => return Err(UsageError("\"jobs\" must be an array".into())),
        },
        _ => return Err(UsageError("sweep file must be an array of jobs or {\"jobs\": [...]}".into())),
    };
    if jobs.is_empty() {
        return Err(UsageError("sweep needs at least one job".into()));
    }
    Ok(jobs)
}

fn run_one(job: &Value, overrides: &Overrides) -> (Option<String>, Result<Outcome, UsageError>) {
    let name = job.get("name").and_then(Value::as_str).map(str::to_string);
    let parsed = serde_json::from_value::<JobConfig>(job.clone()).map_err(|e| UsageError(format!("invalid config: {e}")));
    let outcome = parsed.and_then(|mut cfg| {
        overrides.apply(&mut cfg);
        cfg.validate()?;
        Ok(run(&cfg))
    });
    (name, outcome)
}

/// Runs the jobs in parallel and writes `job_NNN.json` files and
/// `summary.csv` into `out_dir`. A malformed job yields an error report
/// with exit code 2 without affecting the others.
pub fn sweep(jobs: &[Value], out_dir: &Path, overrides: &Overrides) -> io::Result<SweepSummary> {
    fs::create_dir_all(out_dir)?;
    let results: Vec<_> = jobs.par_iter().map(|j| run_one(j, overrides)).collect();
    let mut rows = Vec::with_capacity(results.len());
    for (i, (name, res)) in results.into_iter().enumerate() {
        let file = out_dir.join(format!("job_{i:03}.json"));
        let row = match res {
            Ok(out) => {
                fs::write(&file, out.report_json())?;
                let [bounded, compact, power_bounded, mean_ergodic, uniformly_ergodic] = key_verdicts(&out.report);
                let error = out.report["errors"]
                    .as_array()
                    .and_then(|e| e.first())
                    .and_then(|e| e["error"].as_str())
                    .unwrap_or("")
                    .to_string();
                SweepRow {
                    job: i,
                    name: name.unwrap_or_default(),
                    exit_code: out.exit_code,
                    bounded,
                    compact,
                    power_bounded,
                    mean_ergodic,
                    uniformly_ergodic,
                    max_delta: max_delta(&out.report),
                    error,
                    report_file: file,
                }
            }
            Err(e) => {
                let report = serde_json::json!({"errors": [{"task": "config", "error": e.0}], "exit_code": 2});
                fs::write(&file, serde_json::to_string_pretty(&report)? + "\n")?;
                SweepRow {
                    job: i,
                    name: name.unwrap_or_default(),
                    exit_code: 2,
                    bounded: String::new(),
                    compact: String::new(),
                    power_bounded: String::new(),
                    mean_ergodic: String::new(),
                    uniformly_ergodic: String::new(),
                    max_delta: None,
                    error: e.0,
                    report_file: file,
                }
            }
        };
        rows.push(row);
    }
    let summary_file = out_dir.join("summary.csv");
    write_summary(&rows, &summary_file)?;
    let exit_code = rows.iter().map(|r| r.exit_code).max().unwrap_or(0);
    Ok(SweepSummary {
        rows,
        summary_file,
        exit_code,
    })
}

fn write_summary(rows: &[SweepRow], path: &Path) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "job",
        "name",
        "exit_code",
        "bounded",
        "compact",
        "power_bounded",
        "mean_ergodic",
        "uniformly_ergodic",
        "max_delta",
        "error",
        "report",
    ])?;
    for r in rows {
        let file = r.report_file.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        w.write_record([
            r.job.to_string(),
            r.name.clone(),
            r.exit_code.to_string(),
            r.bounded.clone(),
            r.compact.clone(),
            r.power_bounded.clone(),
            r.mean_ergodic.clone(),
            r.uniformly_ergodic.clone(),
            r.max_delta.map(|d| d.to_string()).unwrap_or_default(),
            r.error.clone(),
            file,
        ])?;
    }
    w.flush()
}
