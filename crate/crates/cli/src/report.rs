//! Report assembly and emission. JSON output is canonical: keys are sorted,
//! so parsing and re-serializing reproduces the bytes. Complex values appear
//! as `[re, im]` pairs. TSV output carries one row per check under a header.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::checks::{CheckOutcome, Status};
use crate::config::ResolvedConfig;

pub const SCHEMA: &str = "bethe-report/1";

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Serialize)]
pub struct CheckRecord {
    pub name: &'static str,
    pub status: &'static str,
    pub defect: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
    pub inputs_digest: String,
    pub values: BTreeMap<String, serde_json::Value>,
    pub wall_ms: u64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: ToolInfo,
    pub config: ResolvedConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

pub fn summarize(outcomes: &[CheckOutcome]) -> Summary {
    Summary {
        total: outcomes.len(),
        passed: outcomes.iter().filter(|o| o.status == Status::Pass).count(),
        failed: outcomes.iter().filter(|o| o.status == Status::Fail).count(),
        skipped: outcomes.iter().filter(|o| !o.status.executed()).count(),
    }
}

pub fn assemble(cfg: &ResolvedConfig, outcomes: Vec<CheckOutcome>) -> Report {
    let summary = summarize(&outcomes);
    Report {
        schema: SCHEMA,
        tool: ToolInfo {
            name: "bethe",
            version: env!("CARGO_PKG_VERSION"),
        },
        config: cfg.clone(),
        checks: outcomes
            .into_iter()
            .map(|o| CheckRecord {
                name: o.name,
                status: o.status.as_str(),
                defect: o.defect,
                tolerance: o.tolerance,
                detail: o.detail,
                inputs_digest: o.inputs_digest,
                values: o.values,
                wall_ms: o.wall_ms,
            })
            .collect(),
        summary,
    }
}

/// Canonical JSON: serialize through `serde_json::Value` so object keys come
/// out sorted, then pretty-print with a trailing newline.
pub fn to_json(report: &Report) -> String {
    let value = serde_json::to_value(report).expect("report serializes");
    let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
    text.push('\n');
    text
}

pub fn to_tsv(report: &Report) -> String {
    let mut text =
        String::from("check\tstatus\tdefect\ttolerance\twall_ms\tinputs_digest\tdetail\n");
    for check in &report.checks {
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            check.name,
            check.status,
            fmt_opt(check.defect),
            fmt_opt(check.tolerance),
            check.wall_ms,
            sanitize(&check.inputs_digest),
            sanitize(&check.detail),
        ));
    }
    text
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:e}"),
        None => "-".to_string(),
    }
}

fn sanitize(text: &str) -> String {
    text.replace(['\t', '\n'], " ")
}
