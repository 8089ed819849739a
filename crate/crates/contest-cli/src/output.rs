//! Output shaping shared by every subcommand.
//!
//! JSON results are a flat envelope `{version, command, config, ...payload}`;
//! CSV documents start with a single comment line carrying the same metadata
//! (`# contest vX.Y.Z <command> <config json>`), then a header and plain
//! rows. Either goes to stdout or to `--out`.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::CliError;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Serializes the envelope around an object payload.
pub fn json_document(command: &str, config: Value, payload: Value) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("version".into(), VERSION.into());
    doc.insert("command".into(), command.into());
    doc.insert("config".into(), config);
    match payload {
        Value::Object(map) => doc.extend(map),
        other => {
            doc.insert("result".into(), other);
        }
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
    text.push('\n');
    text
}

/// The metadata comment line that opens every CSV document.
pub fn csv_preamble(command: &str, config: &Value) -> String {
    format!(
        "# contest v{VERSION} {command} {}\n",
        serde_json::to_string(config).expect("serializable")
    )
}

/// A single-table CSV document.
pub fn csv_document(command: &str, config: &Value, header: &str, rows: &[String]) -> String {
    let mut text = csv_preamble(command, config);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    text
}

/// A CSV document with several titled table sections.
pub fn csv_sections(
    command: &str,
    config: &Value,
    sections: &[(&str, &str, Vec<String>)],
) -> String {
    let mut text = csv_preamble(command, config);
    for (title, header, rows) in sections {
        text.push_str(&format!("# table: {title}\n"));
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
    }
    text
}

/// Writes to `--out` when given, stdout otherwise.
pub fn deliver(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Validation(format!("writing stdout: {e}")))
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Validation(format!("writing {}: {e}", path.display())))
}

/// Formats an optional value, leaving the CSV cell empty for `None`.
pub fn cell(value: Option<f64>) -> String {
    value.map_or_else(String::new, |v| v.to_string())
}
