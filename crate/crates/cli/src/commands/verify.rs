//! Puzzle file verification. Every record is checked independently and
//! every failure is listed.

use std::io::Write;
use std::path::Path;

use serde_json::Value;

use hidden_single_core::grid::Grid;
use hidden_single_core::puzzle::{verify_puzzle, PuzzleRecord, FORMAT_VERSION};

use crate::error::{CliError, Result};
use crate::files::{create, read_lines};
use crate::Ctx;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub line: usize,
    pub id: String,
    pub reason: String,
    pub detail: String,
}

impl Failure {
    fn new(line: usize, id: &str, reason: &str, detail: impl ToString) -> Self {
        Failure { line, id: id.to_string(), reason: reason.to_string(), detail: detail.to_string() }
    }
}

/// Failures of one puzzle line.
pub fn check_line(line_no: usize, line: &str) -> Vec<Failure> {
    let value: Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(e) => return vec![Failure::new(line_no, "?", "unparseable", e)],
    };
    let id = value.get("id").and_then(Value::as_str).unwrap_or("?").to_string();
    let record: PuzzleRecord = match serde_json::from_value(value) {
        Ok(r) => r,
        Err(e) => return vec![Failure::new(line_no, &id, "unparseable", e)],
    };
    let mut out = Vec::new();
    if record.format_version != FORMAT_VERSION {
        out.push(Failure::new(
            line_no,
            &id,
            "format_version",
            format!("expected {FORMAT_VERSION}, found {}", record.format_version),
        ));
    }
    let p = &record.puzzle;
    let mut from_hints = Grid::empty();
    for h in &p.hints {
        if from_hints.get(h.coord).is_some() {
            out.push(Failure::new(line_no, &id, "hints_mismatch", format!("two hints at {}", h.coord)));
        }
        from_hints.place(h.coord, h.digit);
    }
    if from_hints != p.grid {
        out.push(Failure::new(line_no, &id, "hints_mismatch", "grid differs from the listed hints"));
    }
    for f in verify_puzzle(p).failures {
        out.push(Failure::new(line_no, &id, f.reason, f.detail));
    }
    out
}

pub fn run(ctx: &Ctx, input: &Path) -> Result<()> {
    let (meta, lines) = read_lines(input)?;
    let mut failures = Vec::new();
    if let Some(m) = &meta {
        if m.format_version != crate::files::FORMAT_VERSION {
            failures.push(Failure::new(1, "meta", "format_version", format!("file version {}", m.format_version)));
        }
    }
    if lines.is_empty() {
        failures.push(Failure::new(0, "-", "empty", "no puzzles in file"));
    }
    let mut bad = 0;
    for (no, line) in &lines {
        let f = check_line(*no, line);
        bad += !f.is_empty() as usize;
        failures.extend(f);
    }
    let mut out = create(ctx.out())?;
    let name = ctx.out().unwrap_or(Path::new("<stdout>"));
    for f in &failures {
        writeln!(out, "line {} {}: {}: {}", f.line, f.id, f.reason, f.detail).map_err(|e| CliError::io(name, e))?;
    }
    out.flush().map_err(|e| CliError::io(name, e))?;
    ctx.note(&format!("{} of {} puzzles passed", lines.len() - bad, lines.len()));
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{}: {} failure(s) in {bad} puzzle(s)", input.display(), failures.len())))
    }
}
