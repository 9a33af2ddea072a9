use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use backflow_core::{BackflowError, CsvTable};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;

/// Everything that can end a run with exit status 1.
#[derive(Debug)]
pub enum Failure {
    Numerical(BackflowError),
    Io { path: Option<PathBuf>, source: io::Error },
    Input(String),
    Verify(Vec<String>),
}

impl From<BackflowError> for Failure {
    fn from(e: BackflowError) -> Self {
        Failure::Numerical(e)
    }
}

impl Failure {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Failure::Io {
            path: Some(path.to_path_buf()),
            source,
        }
    }

    pub fn diagnostic(&self) -> Value {
        match self {
            Failure::Numerical(e) => json!({
                "error": "numerical",
                "kind": error_kind(e),
                "message": e.to_string(),
                "detail": error_detail(e),
            }),
            Failure::Io { path, source } => json!({
                "error": "io",
                "path": path.as_ref().map(|p| p.display().to_string()),
                "message": source.to_string(),
            }),
            Failure::Input(msg) => json!({ "error": "input", "message": msg }),
            Failure::Verify(failed) => json!({ "error": "verify", "failed": failed }),
        }
    }
}

fn error_kind(e: &BackflowError) -> &'static str {
    match e {
        BackflowError::InvalidAlpha(_) => "invalid_alpha",
        BackflowError::DimensionMismatch { .. } => "dimension_mismatch",
        BackflowError::NotSymmetric { .. } => "not_symmetric",
        BackflowError::NoConvergence { .. } => "no_convergence",
        BackflowError::NoAntisymmetricStates => "no_antisymmetric_states",
        BackflowError::RankDeficient { .. } => "rank_deficient",
        BackflowError::InvalidArgument(_) => "invalid_argument",
        BackflowError::InvalidFigure(_) => "invalid_figure",
        BackflowError::ScanPoint { .. } => "scan_point",
    }
}

fn error_detail(e: &BackflowError) -> Value {
    match e {
        BackflowError::NoConvergence {
            iterations,
            residual,
            target,
        } => json!({ "iterations": iterations, "best_residual": residual, "target": target }),
        BackflowError::ScanPoint { alpha, source } => json!({
            "alpha": alpha,
            "cause": { "kind": error_kind(source), "message": source.to_string(), "detail": error_detail(source) },
        }),
        BackflowError::InvalidAlpha(a) => json!({ "alpha": a }),
        BackflowError::DimensionMismatch { expected, found } => json!({ "expected": expected, "found": found }),
        BackflowError::RankDeficient { distinct } => json!({ "distinct": distinct }),
        _ => Value::Null,
    }
}

/// Config echo shared by every artifact. Contains no timestamps or host
/// details, so identical invocations produce identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: Value,
}

impl Metadata {
    pub fn new(command: &str, seed: u64, config: Value) -> Self {
        Metadata {
            tool: "backflow",
            version: env!("CARGO_PKG_VERSION"),
            core_version: backflow_core::VERSION,
            command: command.to_string(),
            seed,
            config,
        }
    }

    pub fn with_summary(&self, summary: Value) -> Value {
        let mut v = serde_json::to_value(self).expect("metadata serializes");
        v["summary"] = summary;
        v
    }
}

/// CSV with a `# {json}` first line.
pub fn csv_document(meta: &Value, table: &CsvTable) -> String {
    let mut out = String::from("# ");
    out.push_str(&meta.to_string());
    out.push('\n');
    out.push_str(&table.to_csv());
    out
}

/// JSON object `{"metadata": …, "result": …}` with a trailing newline.
pub fn json_document(meta: &Value, result: &Value) -> String {
    let doc = json!({ "metadata": meta, "result": result });
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

pub fn document(format: Format, meta: &Value, table: &CsvTable, result: &Value) -> String {
    match format {
        Format::Csv => csv_document(meta, table),
        Format::Json => json_document(meta, result),
    }
}

pub fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|source| Failure::Io { path: None, source })
        }
    }
}
