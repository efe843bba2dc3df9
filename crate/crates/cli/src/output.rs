//! CSV tables and the JSON manifest.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::Cli;
use crate::CliError;

/// A named table. Cells are pre-formatted so output bytes are fixed by the
/// values alone.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.header)?;
        for r in &self.rows {
            wr.write_record(r)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// Shortest round-trip form; scientific outside `[1e-5, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// What a subcommand hands back before anything is written.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    /// The first table is the main one.
    pub tables: Vec<Table>,
    pub statistics: serde_json::Value,
    pub criteria: Vec<Criterion>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultManifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a Cli,
    pub outputs: Vec<String>,
    pub statistics: &'a serde_json::Value,
    pub criteria: &'a [Criterion],
    pub wall_time_s: f64,
}

/// `out` for the main table, `<stem>_<name>.csv` for the others.
pub fn table_paths(out: &Path, tables: &[Table]) -> Vec<PathBuf> {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    tables
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if i == 0 {
                out.to_path_buf()
            } else {
                out.with_file_name(format!("{stem}_{}.csv", t.name))
            }
        })
        .collect()
}

pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}
