//! Reading and writing the inspectable files that connect pipeline stages.
//!
//! Tables are CSV or JSON lines. Both carry a metadata record first: a
//! `{"meta": {...}}` line in JSON lines, or the same JSON behind `# ` in CSV.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

/// Version of the files this tool writes.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

/// Provenance embedded in every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub format_version: u32,
    pub command: String,
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl Meta {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        Meta { format_version: FORMAT_VERSION, command: command.to_string(), seed, extra: Map::new() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.extra.insert(key.to_string(), serde_json::to_value(value).expect("metadata serializes"));
        self
    }

    fn line(&self) -> String {
        serde_json::json!({ "meta": self }).to_string()
    }
}

#[derive(Deserialize)]
struct MetaLine {
    meta: Meta,
}

/// A buffered file, or stdout when no path is given. Parent directories
/// are created.
pub fn create(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            let f = File::create(p).map_err(|e| CliError::io(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn out_name(path: Option<&Path>) -> PathBuf {
    path.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("<stdout>"))
}

pub fn write_table<T: Serialize>(
    path: Option<&Path>,
    format: Format,
    meta: &Meta,
    columns: &[&str],
    rows: &[T],
) -> Result<()> {
    let name = out_name(path);
    let mut out = create(path)?;
    let io_err = |e: io::Error| CliError::io(&name, e);
    match format {
        Format::Csv => {
            writeln!(out, "# {}", meta.line()).map_err(io_err)?;
            hidden_single_core::export::write_rows(rows, columns, &mut out)
                .map_err(|e| CliError::format(&name, e))?;
        }
        Format::Jsonl => {
            writeln!(out, "{}", meta.line()).map_err(io_err)?;
            for r in rows {
                serde_json::to_writer(&mut out, r).map_err(|e| CliError::format(&name, e))?;
                out.write_all(b"\n").map_err(io_err)?;
            }
        }
    }
    out.flush().map_err(io_err)
}

/// Writes one pretty-printed JSON document.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let name = out_name(path);
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::format(&name, e))?;
    out.write_all(b"\n").and_then(|_| out.flush()).map_err(|e| CliError::io(&name, e))
}

pub fn read_to_string(path: &Path) -> Result<String> {
    let mut s = String::new();
    File::open(path).and_then(|mut f| f.read_to_string(&mut s)).map_err(|e| CliError::io(path, e))?;
    Ok(s)
}

/// Reads a table written by [`write_table`] in either format, or a bare CSV
/// or JSON-lines file without metadata.
pub fn read_table<T: DeserializeOwned>(path: &Path) -> Result<(Option<Meta>, Vec<T>)> {
    let text = read_to_string(path)?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.starts_with('{') {
        read_jsonl(path, &text)
    } else {
        let meta = first.strip_prefix("# ").and_then(|l| serde_json::from_str::<MetaLine>(l).ok()).map(|m| m.meta);
        let rows = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes())
            .deserialize()
            .collect::<csv::Result<Vec<T>>>()
            .map_err(|e| CliError::format(path, e))?;
        Ok((meta, rows))
    }
}

fn read_jsonl<T: DeserializeOwned>(path: &Path, text: &str) -> Result<(Option<Meta>, Vec<T>)> {
    let mut meta = None;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if i == 0 {
            if let Ok(m) = serde_json::from_str::<MetaLine>(line) {
                meta = Some(m.meta);
                continue;
            }
        }
        rows.push(serde_json::from_str(line).map_err(|e| CliError::format(path, format!("line {}: {e}", i + 1)))?);
    }
    Ok((meta, rows))
}

/// A line and its 1-based number.
pub type Numbered = (usize, String);

/// Non-empty lines of a JSON-lines file with their 1-based numbers; the
/// metadata line is returned separately.
pub fn read_lines(path: &Path) -> Result<(Option<Meta>, Vec<Numbered>)> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut meta = None;
    let mut lines = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        if i == 0 {
            if let Ok(m) = serde_json::from_str::<MetaLine>(&line) {
                meta = Some(m.meta);
                continue;
            }
        }
        lines.push((i + 1, line));
    }
    Ok((meta, lines))
}
