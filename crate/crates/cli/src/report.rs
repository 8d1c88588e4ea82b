//! Run reports and their JSON / CSV encodings.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// One pass/fail decision together with the bound it was tested against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub observed: Value,
    /// `<=`, `>=`, `<`, `==`.
    pub relation: String,
    pub bound: Value,
    pub pass: bool,
    /// `pass`, `fail`, or a documented non-failure such as `lemma inapplicable`.
    pub verdict: String,
    pub summary: String,
}

impl Verdict {
    pub fn compare(check: &str, observed: f64, relation: &str, bound: f64) -> Verdict {
        let pass = match relation {
            "<=" => observed <= bound,
            ">=" => observed >= bound,
            "<" => observed < bound,
            "==" => observed == bound,
            _ => unreachable!("unknown relation {relation}"),
        };
        Verdict::with_outcome(check, Value::from(observed), relation, Value::from(bound), pass)
    }

    pub fn with_outcome(check: &str, observed: Value, relation: &str, bound: Value, pass: bool) -> Verdict {
        let verdict = if pass { "pass" } else { "fail" }.to_string();
        let summary = format!("{check}: {observed} {relation} {bound}: {verdict}");
        Verdict { check: check.into(), observed, relation: relation.into(), bound, pass, verdict, summary }
    }

    /// A check whose precondition does not hold; reported, never failing.
    pub fn inapplicable(check: &str, observed: Value, reason: &str) -> Verdict {
        Verdict {
            check: check.into(),
            observed,
            relation: "n/a".into(),
            bound: Value::Null,
            pass: true,
            verdict: reason.into(),
            summary: format!("{check}: {reason}"),
        }
    }

    pub fn summary(mut self, summary: String) -> Verdict {
        self.summary = summary;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub artifact: String,
    pub command: String,
    pub config: Value,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

pub const ARTIFACT: &str = concat!("polyspline ", env!("CARGO_PKG_VERSION"));

impl RunReport {
    pub fn new(command: &str, config: Value, results: Value, verdicts: Vec<Verdict>) -> RunReport {
        let pass = verdicts.iter().all(|v| v.pass);
        RunReport {
            artifact: ARTIFACT.into(),
            command: command.into(),
            config,
            results,
            verdicts,
            pass,
            wall_clock_ms: None,
        }
    }

    pub fn without_timing(mut self) -> RunReport {
        self.wall_clock_ms = None;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Columns of the sweep CSV, in order.
pub const SWEEP_COLUMNS: [&str; 9] = [
    "rho",
    "corrupted",
    "eps_hat",
    "disagreement_with_g",
    "recovered",
    "margin_min",
    "margin_mean",
    "flagged",
    "error",
];

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn emit(report: &RunReport, format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            if report.command != "sweep" {
                return Err(CliError::input("CSV output is only available for sweep"));
            }
            let rows = report.results.get("rows").and_then(Value::as_array).cloned().unwrap_or_default();
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(SWEEP_COLUMNS)?;
            for row in &rows {
                w.write_record(SWEEP_COLUMNS.iter().map(|c| csv_cell(row.get(*c).unwrap_or(&Value::Null))))?;
            }
            w.into_inner().map_err(|e| CliError::input(e.to_string()))
        }
    }
}
