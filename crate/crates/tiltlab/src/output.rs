//! Artifact rendering: CSV with a `#` config line, or one JSON object.

use std::fmt::Display;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Value};

use crate::args::Format;

/// A rectangular table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip form; `inf`, `-inf` and `nan` as is.
pub fn cell(x: impl Display) -> String {
    x.to_string()
}

#[derive(Debug, Clone)]
pub struct Artifact {
    pub config: Value,
    pub results: Value,
    pub table: Table,
    pub warnings: Vec<String>,
}

impl Artifact {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let doc = json!({
                    "config": self.config,
                    "results": self.results,
                    "warnings": self.warnings,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = format!("# {}\n", self.config);
                for w in &self.warnings {
                    s.push_str(&format!("# warning: {w}\n"));
                }
                s.push_str(&self.table.header.join(","));
                s.push('\n');
                for row in &self.table.rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                s
            }
        }
    }
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
