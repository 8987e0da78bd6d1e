//! Report plumbing: run manifests, JSON/CSV rendering, and output routing.
//!
//! Determinism contract: the payload written for a given argv is
//! byte-identical across runs. The manifest block embedded in the payload
//! therefore carries only the reproducible fields (command, version,
//! materialized parameters); wall-clock duration and output paths go into a
//! sidecar `<path>.manifest.json` that exists only for file outputs.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Reproducible description of one invocation with every default
/// materialized.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Alphabetical parameter map; values are JSON scalars.
    pub parameters: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_secs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            parameters: BTreeMap::new(),
            wall_clock_secs: None,
            outputs: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("parameter serializes");
        self.parameters.insert(key.into(), v);
    }
}

/// A rendered table for CSV emission.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row<S: Into<String>>(&mut self, row: Vec<S>) {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }
}

/// Shortest round-trip decimal rendering, shared by every CSV cell.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// RFC-4180 quoting for cells containing separators or quotes.
fn csv_cell(c: &str) -> String {
    if c.contains(['"', ',', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// Serialize the payload for the chosen format. JSON embeds the manifest as
/// a leading block; CSV carries it as one `#`-prefixed comment line above
/// the header.
pub fn render(
    manifest: &RunManifest,
    report: &Value,
    table: &Table,
    format: Format,
) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let doc = serde_json::json!({
                "manifest": manifest,
                "report": report,
            });
            let mut s = serde_json::to_string_pretty(&doc)
                .map_err(|e| CliError::runtime(format!("serialization failed: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let compact = serde_json::to_string(manifest)
                .map_err(|e| CliError::runtime(format!("serialization failed: {e}")))?;
            let mut s = format!("# manifest {compact}\n");
            let quote = |cells: &[String]| {
                cells
                    .iter()
                    .map(|c| csv_cell(c))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            s.push_str(&quote(&table.header));
            s.push('\n');
            for row in &table.rows {
                s.push_str(&quote(row));
                s.push('\n');
            }
            Ok(s)
        }
    }
}

/// Write the payload to `out` ("-" = standard output). File targets also get
/// a `<path>.manifest.json` sidecar carrying the wall-clock duration and the
/// written paths.
pub fn emit(
    manifest: &RunManifest,
    report: &Value,
    table: &Table,
    format: Format,
    out: &str,
    started: Instant,
) -> Result<(), CliError> {
    let payload = render(manifest, report, table, format)?;
    if out == "-" {
        std::io::stdout()
            .write_all(payload.as_bytes())
            .map_err(|e| CliError::runtime(format!("writing standard output: {e}")))?;
        return Ok(());
    }
    fs::write(out, payload.as_bytes())
        .map_err(|e| CliError::runtime(format!("writing {out}: {e}")))?;
    let sidecar_path = format!("{out}.manifest.json");
    let mut full = manifest.clone();
    full.wall_clock_secs = Some(started.elapsed().as_secs_f64());
    full.outputs = Some(vec![out.to_string(), sidecar_path.clone()]);
    let mut doc = serde_json::to_string_pretty(&full)
        .map_err(|e| CliError::runtime(format!("serialization failed: {e}")))?;
    doc.push('\n');
    fs::write(&sidecar_path, doc.as_bytes())
        .map_err(|e| CliError::runtime(format!("writing {sidecar_path}: {e}")))?;
    Ok(())
}
