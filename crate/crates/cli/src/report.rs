//! `report.csv`, `summary.json` and `plots/*.dat`.

use std::fs;
use std::path::Path;

use bernstein_core::verify::CheckReport;
use serde_json::{json, Map, Value};

use crate::checks::{CheckOutput, Plot};
use crate::error::{CliError, CliResult};

pub const CSV_COLUMNS: [&str; 8] = ["check", "scenario", "lhs", "rhs", "ratio", "tol", "pass", "tail_indicator"];

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub seed: Option<u64>,
    /// Check name and output, in run order.
    pub checks: Vec<(String, CheckOutput)>,
}

impl RunReport {
    pub fn rows(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().flat_map(|(_, o)| o.rows.iter())
    }

    pub fn all_pass(&self) -> bool {
        self.rows().all(|r| r.pass)
    }
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

pub fn csv_bytes(run: &RunReport) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::io("report.csv", std::io::Error::other(e));
    w.write_record(CSV_COLUMNS).map_err(err)?;
    for r in run.rows() {
        w.write_record([
            r.name.clone(),
            r.scenario.clone(),
            num(r.lhs),
            num(r.rhs),
            num(r.ratio),
            num(r.tolerance),
            r.pass.to_string(),
            r.tail_indicator.map(num).unwrap_or_default(),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::io("report.csv", std::io::Error::other(e.to_string())))
}

fn row_json(r: &CheckReport) -> Value {
    let extras: Map<String, Value> = r.extras.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({
        "check": r.name,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "ratio": r.ratio,
        "tol": r.tolerance,
        "pass": r.pass,
        "tail_indicator": r.tail_indicator,
        "extras": extras,
        "notes": r.notes,
        "series": r.series.iter().map(|(x, y)| json!([x, y])).collect::<Vec<_>>(),
    })
}

/// Deterministic: no timings, keys sorted.
pub fn summary_json(run: &RunReport) -> Value {
    let checks: Vec<Value> = run
        .checks
        .iter()
        .map(|(name, o)| {
            json!({
                "name": name,
                "pass": o.rows.iter().all(|r| r.pass),
                "rows": o.rows.iter().map(row_json).collect::<Vec<_>>(),
                "plots": o.plots.iter().map(|p| format!("plots/{}", p.file)).collect::<Vec<_>>(),
                "files": o.files.iter().map(|(f, _)| f.clone()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "scenario": run.scenario,
        "seed": run.seed,
        "all_pass": run.all_pass(),
        "rows": run.rows().count(),
        "checks": checks,
    })
}

pub fn plot_text(p: &Plot) -> String {
    let mut s = format!("# {}\n", p.columns.join(" "));
    for row in &p.rows {
        s.push_str(&row.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" "));
        s.push('\n');
    }
    s
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path.display().to_string(), e))
}

pub fn write_all(out: &Path, run: &RunReport) -> CliResult<()> {
    let plots = out.join("plots");
    fs::create_dir_all(&plots).map_err(|e| CliError::io(plots.display().to_string(), e))?;
    write(&out.join("report.csv"), &csv_bytes(run)?)?;
    let mut summary = serde_json::to_string_pretty(&summary_json(run)).expect("plain JSON values");
    summary.push('\n');
    write(&out.join("summary.json"), summary.as_bytes())?;
    for (_, o) in &run.checks {
        for p in &o.plots {
            write(&plots.join(&p.file), plot_text(p).as_bytes())?;
        }
        for (name, bytes) in &o.files {
            write(&out.join(name), bytes)?;
        }
    }
    Ok(())
}
