//! Report rendering and atomic file output.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::experiments::{Experiment, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// Explicit choice, else the extension of `out`, else JSON.
    pub fn resolve(explicit: Option<Format>, out: Option<&Path>) -> Format {
        explicit.unwrap_or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        })
    }
}

pub fn render(experiment: &Experiment, max_stage: Option<usize>, outcome: &Outcome, format: Format) -> anyhow::Result<Vec<u8>> {
    let config = serde_json::to_value(experiment)?;
    match format {
        Format::Json => {
            let report = json!({
                "tool": env!("CARGO_BIN_NAME"),
                "version": env!("CARGO_PKG_VERSION"),
                "config": { "experiment": config, "max_stage": max_stage },
                "status": outcome.status,
                "result": outcome.result,
            });
            let mut bytes = serde_json::to_vec_pretty(&report)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let mut bytes = Vec::new();
            writeln!(bytes, "# tool: {} {}", env!("CARGO_BIN_NAME"), env!("CARGO_PKG_VERSION"))?;
            writeln!(bytes, "# config: {}", json!({ "experiment": config, "max_stage": max_stage }))?;
            writeln!(bytes, "# status: {}", outcome.status)?;
            let mut writer = csv::Writer::from_writer(bytes);
            writer.write_record(&outcome.header)?;
            for row in &outcome.rows {
                writer.write_record(row)?;
            }
            Ok(writer.into_inner().context("flushing CSV")?)
        }
    }
}

/// Writes through a temporary file in the target directory so readers never
/// see a partial report.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    file.write_all(bytes)?;
    file.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
