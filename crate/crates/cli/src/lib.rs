//! Reports for Seifert-fibered homology spheres and the perturbation lab,
//! shared by the `sfinv` binary and its tests.

pub mod error;
pub mod report;
pub mod request;
pub mod table;

use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

pub use error::{CliError, EXIT_CHECK, EXIT_OK, EXIT_VALIDATION};
pub use report::{run, CsvTable, Outcome};
pub use request::{Format, Request};

/// Pretty, key-sorted JSON followed by a newline.
pub fn to_json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

pub fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Json => to_json_text(&outcome.json),
        Format::Table => outcome.table.clone(),
    }
}

/// Output of a batch: one compact JSON line per input line.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutput {
    pub lines: Vec<String>,
    pub ok: bool,
}

impl BatchOutput {
    pub fn text(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok {
            EXIT_OK
        } else {
            EXIT_CHECK
        }
    }
}

/// Lines are independent; output order follows input order.
pub fn run_batch(contents: &str) -> BatchOutput {
    let results: Vec<(Value, bool)> = contents
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(i, line)| {
            let outcome = serde_json::from_str::<Request>(line)
                .map_err(|e| CliError::validation("malformed_request", e.to_string()))
                .and_then(|req| run(&req));
            match outcome {
                Ok(o) => (o.json, o.ok),
                Err(e) => {
                    let mut v = e.to_json();
                    v["error"]["line"] = json!(i + 1);
                    (v, false)
                }
            }
        })
        .collect();
    BatchOutput {
        ok: results.iter().all(|(_, ok)| *ok),
        lines: results
            .iter()
            .map(|(v, _)| serde_json::to_string(v).expect("values serialize"))
            .collect(),
    }
}

pub fn write_csv(path: &Path, table: &CsvTable) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::validation("io", format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::validation("io", format!("{}: {e}", path.display())))
}
