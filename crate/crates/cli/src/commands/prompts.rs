//! Language-model prompts: written to files in a dry run, or sent to a
//! completion endpoint and scored.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use hidden_single_core::prompts::{
    build_prompt, run_batch, write_dry_run, BatchItem, BatchOptions, EndpointConfig, HttpCompleter, PromptSpec,
    ResultRow,
};
use hidden_single_core::puzzle::{HiddenSinglePuzzle, PuzzleRecord, ResponseRole};
use hidden_single_core::rng::derive_seed;

use crate::commands::gen::{generate, puzzle_id};
use crate::error::{CliError, Result};
use crate::files::{read_lines, read_to_string, write_json, write_table, Format, Meta};
use crate::Ctx;

pub const MANIFEST_COLUMNS: [&str; 5] = ["puzzle_id", "spec", "file", "target", "distractor"];
pub const RESULT_COLUMNS: [&str; 5] = ["puzzle_id", "spec", "answer", "role", "correct"];
const SHOT_POOL: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub puzzle_id: String,
    pub spec: String,
    pub file: String,
    pub target: u8,
    pub distractor: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecSummary {
    pub n: usize,
    pub accuracy: f64,
    pub unanswered: usize,
    /// Share of answers per role: in-house, absent, distractor, target.
    pub role_rates: [f64; 4],
}

pub fn parse_specs(labels: &[String]) -> Result<Vec<PromptSpec>> {
    if labels.is_empty() {
        return Ok(PromptSpec::standard());
    }
    labels
        .iter()
        .map(|l| PromptSpec::parse(l.trim()).ok_or_else(|| CliError::Usage(format!("unknown prompt spec {l:?}"))))
        .collect()
}

fn load_puzzles(path: &Path) -> Result<Vec<(String, HiddenSinglePuzzle)>> {
    let (_, lines) = read_lines(path)?;
    lines
        .into_iter()
        .enumerate()
        .map(|(i, (no, line))| {
            let v: serde_json::Value =
                serde_json::from_str(&line).map_err(|e| CliError::format(path, format!("line {no}: {e}")))?;
            let id = v.get("id").and_then(|x| x.as_str()).map(str::to_string).unwrap_or_else(|| puzzle_id(i));
            let r: PuzzleRecord =
                serde_json::from_value(v).map_err(|e| CliError::format(path, format!("line {no}: {e}")))?;
            Ok((id, r.puzzle))
        })
        .collect()
}

/// Every (puzzle, spec) prompt. Few-shot examples come from a separate
/// stream so they never coincide with the evaluated puzzles.
pub fn build_items(puzzles: &[(String, HiddenSinglePuzzle)], specs: &[PromptSpec], seed: u64) -> Result<Vec<BatchItem>> {
    let shots: Vec<HiddenSinglePuzzle> =
        generate(SHOT_POOL, 1, derive_seed(seed, "shots", 0))?.into_iter().map(|r| r.record.puzzle).collect();
    let mut items = Vec::with_capacity(puzzles.len() * specs.len());
    for (i, (id, p)) in puzzles.iter().enumerate() {
        for spec in specs {
            let prompt = build_prompt(spec, p, &shots[..spec.shots], derive_seed(seed, "prompt", i as u64))
                .map_err(|e| CliError::Usage(format!("{}: {e}", spec.label())))?;
            items.push(BatchItem { puzzle_id: id.clone(), spec: *spec, prompt, puzzle: p.clone() });
        }
    }
    Ok(items)
}

pub fn summarize(rows: &[ResultRow]) -> BTreeMap<String, SpecSummary> {
    let mut by: BTreeMap<String, Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        by.entry(r.spec.clone()).or_default().push(r);
    }
    by.into_iter()
        .map(|(spec, rs)| {
            let n = rs.len();
            let mut counts = [0usize; 4];
            for r in &rs {
                if let Some(role) = r.role.as_deref().and_then(ResponseRole::parse) {
                    counts[role.index()] += 1;
                }
            }
            let summary = SpecSummary {
                n,
                accuracy: rs.iter().filter(|r| r.correct).count() as f64 / n as f64,
                unanswered: rs.iter().filter(|r| r.answer.is_none()).count(),
                role_rates: counts.map(|c| c as f64 / n as f64),
            };
            (spec, summary)
        })
        .collect()
}

pub fn run(ctx: &Ctx, input: Option<&Path>, labels: &[String], dry_run: bool, endpoint: Option<&Path>) -> Result<()> {
    let dir = ctx.out_dir("prompts")?;
    let specs = parse_specs(labels)?;
    let seed = ctx.seed();
    let puzzles = match input {
        Some(p) => load_puzzles(p)?,
        None => generate(ctx.n(50)?, 1, derive_seed(seed, "puzzles", 0))?
            .into_iter()
            .map(|r| (r.id, r.record.puzzle))
            .collect(),
    };
    let items = build_items(&puzzles, &specs, seed)?;
    let spec_labels: Vec<String> = specs.iter().map(PromptSpec::label).collect();
    let meta = Meta::new("prompts", Some(seed)).with("specs", &spec_labels).with("puzzles", puzzles.len());
    let ext = match ctx.format() {
        Format::Csv => "csv",
        Format::Jsonl => "jsonl",
    };

    if dry_run {
        let files = write_dry_run(&dir.join("prompts"), &items).map_err(|e| CliError::io(&dir, e))?;
        let manifest: Vec<ManifestRow> = items
            .iter()
            .zip(&files)
            .map(|(it, f)| ManifestRow {
                puzzle_id: it.puzzle_id.clone(),
                spec: it.spec.label(),
                file: f.strip_prefix(&dir).unwrap_or(f).display().to_string(),
                target: it.puzzle.target.get(),
                distractor: it.puzzle.distractor.get(),
            })
            .collect();
        write_table(Some(&dir.join(format!("manifest.{ext}"))), ctx.format(), &meta, &MANIFEST_COLUMNS, &manifest)?;
        ctx.note(&format!("wrote {} prompts", items.len()));
        return Ok(());
    }

    let config: EndpointConfig = match endpoint {
        Some(p) => toml::from_str(&read_to_string(p)?).map_err(|e| CliError::format(p, e))?,
        None => ctx
            .config
            .endpoint
            .clone()
            .ok_or_else(|| CliError::Usage("prompts needs --dry-run, --endpoint or an [endpoint] config".into()))?,
    };
    let opts = ctx.config.batch.apply(BatchOptions::default());
    let meta = meta.with("model", &config.model).with("url", &config.url);
    let result = run_batch(&items, &HttpCompleter::new(config), &opts);
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    write_table(Some(&dir.join(format!("results.{ext}"))), ctx.format(), &meta, &RESULT_COLUMNS, &result.rows)?;
    write_json(Some(&dir.join("summary.json")), &serde_json::json!({ "meta": meta, "specs": summarize(&result.rows) }))?;
    ctx.note(&format!("accuracy {:.3} over {} prompts, {failed} request(s) failed", result.accuracy, result.rows.len()));
    if failed == result.rows.len() {
        return Err(CliError::Validation("every request failed".into()));
    }
    Ok(())
}
