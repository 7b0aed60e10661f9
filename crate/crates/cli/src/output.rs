use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::scenario::Scenario;
use crate::Failure;

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub scenario: Scenario,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Value>,
    pub result: Value,
}

/// A named CSV table, header row first.
pub struct Table {
    pub name: &'static str,
    pub bytes: Vec<u8>,
}

pub struct Output {
    pub report: Report,
    /// The first table is the one written for `--format csv`.
    pub tables: Vec<Table>,
    pub default_format: Format,
}

pub fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

/// Builds a CSV table with `write`, mapping writer errors to output failures.
pub fn table(
    name: &'static str,
    write: impl FnOnce(&mut Vec<u8>) -> coopgame::Result<()>,
) -> Result<Table, Failure> {
    let mut bytes = Vec::new();
    write(&mut bytes)?;
    Ok(Table { name, bytes })
}

/// A CSV table from a header and rows of displayable cells.
pub fn rows(name: &'static str, header: &[&str], rows: Vec<Vec<String>>) -> Result<Table, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(output_error)?;
    for row in rows {
        w.write_record(&row).map_err(output_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Output(e.to_string()))?;
    Ok(Table { name, bytes })
}

fn output_error(e: impl std::fmt::Display) -> Failure {
    Failure::Output(e.to_string())
}

fn comment_lines(report: &Report) -> String {
    let mut text = format!("# command: {}\n", report.command);
    if let Some(Value::Object(map)) = &report.metadata {
        for (key, value) in map {
            text.push_str(&format!("# {key}: {value}\n"));
        }
    }
    text.push_str(&format!("# scenario: {}\n", to_value(&report.scenario)));
    text
}

fn write_target(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| Failure::Output(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(output_error)
        }
    }
}

fn json_bytes(report: &Report) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text.into_bytes()
}

/// Writes one document to `out` or stdout. CSV output is preceded by `# `
/// comment lines holding the command, metadata and resolved scenario.
pub fn emit(output: &Output, format: Option<Format>, out: Option<&Path>) -> Result<(), Failure> {
    match format.unwrap_or(output.default_format) {
        Format::Json => write_target(out, &json_bytes(&output.report)),
        Format::Csv => {
            let primary = output.tables.first().ok_or_else(|| {
                Failure::Input(format!("`{}` has no tabular output; use --format json", output.report.command))
            })?;
            let mut bytes = comment_lines(&output.report).into_bytes();
            bytes.extend_from_slice(&primary.bytes);
            write_target(out, &bytes)
        }
    }
}

/// Writes `report.json` and one CSV file per table into `dir`.
pub fn emit_dir(output: &Output, dir: &Path) -> Result<Vec<String>, Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Output(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = vec!["report.json".to_owned()];
    write_target(Some(&dir.join("report.json")), &json_bytes(&output.report))?;
    for t in &output.tables {
        let name = format!("{}.csv", t.name);
        write_target(Some(&dir.join(&name)), &t.bytes)?;
        written.push(name);
    }
    Ok(written)
}
