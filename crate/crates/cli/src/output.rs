use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// Everything needed to reproduce one output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunManifest {
    pub command: String,
    /// Parsed channel spec, when the command reads one.
    pub channel_spec: Option<Value>,
    pub parameters: Value,
    pub seed: Option<u64>,
    /// Command-line arguments without `--out`; `replay` feeds them back.
    pub args: Vec<String>,
    pub timestamp: String,
    pub toolkit_version: String,
    pub output_path: Option<PathBuf>,
}

impl RunManifest {
    pub fn path_for(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }
}

/// Drops `--out X` and `--out=X`, keeping everything else in order.
pub fn strip_out(args: &[OsString]) -> Vec<String> {
    let mut kept = Vec::new();
    let mut skip = false;
    for a in args {
        let a = a.to_string_lossy().into_owned();
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            kept.push(a);
        }
    }
    kept
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(covertq::json::to_string(value)?)
}

/// CSV with 17-significant-digit fields and LF line endings.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| covertq::json::format_f64(x)))
            .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

/// Writes `content` to `out` (plus the manifest) or prints it.
pub fn emit(out: Option<&Path>, content: &str, mut manifest: RunManifest) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
            fs::write(path, content).map_err(io)?;
            manifest.output_path = Some(path.to_path_buf());
            let text = json(&manifest)?;
            fs::write(RunManifest::path_for(path), text).map_err(io)?;
        }
        None => print!("{content}"),
    }
    Ok(())
}
