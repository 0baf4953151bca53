//! File output: atomic writes, CSV with a reproducibility header, and
//! JSON with the same metadata embedded.
//!
//! Floats are written with Rust's shortest-roundtrip formatting, so CSV
//! and JSON carry full double precision and identical inputs yield
//! byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Provenance stamped into every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Meta {
    pub fn new(config_hash: &str, seed: u64) -> Self {
        Self {
            tool: "gespin".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash.to_string(),
            seed,
        }
    }

    fn comment_line(&self) -> String {
        format!(
            "# {} v{} config={} seed={}",
            self.tool, self.version, self.config_hash, self.seed
        )
    }
}

/// Writes via a temp file in the same directory, then renames over the
/// target so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output dir `{}`", dir.display()))?;
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    std::fs::write(&tmp, bytes).with_context(|| format!("cannot write `{}`", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("cannot rename into place `{}`", path.display()))?;
    Ok(())
}

/// A value cell: numbers keep shortest-roundtrip formatting; infinities
/// print as `inf` in CSV.
pub enum Cell {
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) if v.is_infinite() && *v > 0.0 => "inf".to_string(),
            Cell::Float(v) if v.is_infinite() => "-inf".to_string(),
            // Shortest-roundtrip scientific form: full precision, compact.
            Cell::Float(v) => format!("{v:e}"),
            Cell::Text(s) => {
                if s.contains(',') || s.contains('"') {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Float(v) if v.is_infinite() && *v > 0.0 => {
                serde_json::Value::String("inf".into())
            }
            Cell::Float(v) if v.is_infinite() => serde_json::Value::String("-inf".into()),
            Cell::Float(v) => serde_json::json!(v),
            Cell::Text(s) => serde_json::Value::String(s.clone()),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

/// A simple rectangular table rendered to either format. Annotations
/// become extra `#` comment lines in CSV and an `annotations` map in
/// JSON (used for the grade markers on curve exports).
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub annotations: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            annotations: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn annotate(&mut self, key: &str, value: String) {
        self.annotations.push((key.to_string(), value));
    }

    pub fn to_csv(&self, meta: &Meta) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", meta.comment_line());
        for (key, value) in &self.annotations {
            let _ = writeln!(out, "# {key} {value}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self, meta: &Meta) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.clone(), cell.json()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut doc = serde_json::json!({
            "meta": meta,
            "rows": rows,
        });
        if !self.annotations.is_empty() {
            let map: serde_json::Map<String, serde_json::Value> = self
                .annotations
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect();
            doc["annotations"] = serde_json::Value::Object(map);
        }
        let mut text = serde_json::to_string_pretty(&doc).expect("json serializes");
        text.push('\n');
        text
    }

    /// Writes `<stem>.<ext>` into `dir` and returns the path.
    pub fn write(&self, dir: &Path, stem: &str, format: Format, meta: &Meta) -> Result<PathBuf> {
        let path = dir.join(format!("{stem}.{}", format.extension()));
        let body = match format {
            Format::Csv => self.to_csv(meta),
            Format::Json => self.to_json(meta),
        };
        write_atomic(&path, body.as_bytes())?;
        Ok(path)
    }
}

/// Three-significant-figure engineering display for console summaries.
pub fn sig3(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-3..4).contains(&exp) {
        let decimals = (2 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.2e}")
    }
}
