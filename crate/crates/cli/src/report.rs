//! Report envelope and sidecar emission.
//!
//! Reports are JSON on standard output (and optionally a file); identical
//! inputs, options, and seed produce byte-identical reports. CSV sidecars
//! use a header row, comma separators, shortest round-trip decimal floats,
//! and LF line endings.

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct Report<O: Serialize, R: Serialize> {
    pub command: &'static str,
    pub options: O,
    pub inputs_digest: String,
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: R,
}

impl<O: Serialize, R: Serialize> Report<O, R> {
    pub fn new(
        command: &'static str,
        options: O,
        inputs_digest: String,
        seed: Option<u64>,
        results: R,
    ) -> Self {
        Self {
            command,
            options,
            inputs_digest,
            tool_version: env!("CARGO_PKG_VERSION"),
            seed,
            results,
        }
    }

    /// Renders the report, prints it to stdout, and mirrors it to
    /// `output` when given.
    pub fn emit(&self, output: Option<&std::path::Path>) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("reports always serialize");
        text.push('\n');
        print!("{text}");
        if let Some(path) = output {
            std::fs::write(path, &text)?;
        }
        Ok(())
    }
}

/// Writes a CSV sidecar: `header` then one line per row, floats rendered
/// with shortest round-trip precision, LF endings.
pub fn write_csv(
    path: &std::path::Path,
    header: &str,
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<(), CliError> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        let mut first = true;
        for value in row {
            if !first {
                text.push(',');
            }
            first = false;
            text.push_str(&format_cell(value));
        }
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Integers render without a decimal point; everything else uses the
/// shortest representation that round-trips.
fn format_cell(value: f64) -> String {
    if value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{}", value as i64)
    } else {
        format!("{value}")
    }
}
