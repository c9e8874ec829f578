//! Puzzle generation. Puzzle `i` belongs to assignment `i * k / n` and
//! condition `i mod 16`, so every assignment sees every condition.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use hidden_single_core::puzzle::{
    assign_participant, derive_condition_features_seeded, generate_puzzle, ConditionCombo, HiddenSinglePuzzle,
    PuzzleRecord,
};
use hidden_single_core::rng::derive_seed;

use crate::error::{CliError, Result};
use crate::files::{create, Format, Meta};
use crate::Ctx;

/// One line of a puzzle file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenRecord {
    pub id: String,
    pub assignment: usize,
    #[serde(flatten)]
    pub record: PuzzleRecord,
}

pub fn puzzle_id(i: usize) -> String {
    format!("puzzle-{:05}", i + 1)
}

pub fn generate(n: usize, assignments: usize, seed: u64) -> Result<Vec<GenRecord>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let a = i * assignments / n;
            let assignment = assign_participant(derive_seed(seed, "assignment", a as u64));
            let condition = ConditionCombo::from_index((i % 16) as u8);
            let features = derive_condition_features_seeded(&assignment, condition, derive_seed(seed, "features", i as u64));
            let mut p: HiddenSinglePuzzle = generate_puzzle(&features, derive_seed(seed, "puzzle", i as u64))
                .map_err(|e| CliError::Validation(format!("puzzle {}: {e}", i + 1)))?;
            p.condition = condition;
            Ok(GenRecord { id: puzzle_id(i), assignment: a, record: p.to_record() })
        })
        .collect()
}

pub fn run(ctx: &Ctx, assignments: Option<usize>) -> Result<()> {
    if ctx.format() == Format::Csv && ctx.global.format.is_some() {
        return Err(CliError::Usage("puzzles are written as jsonl".into()));
    }
    let n = ctx.n(100)?;
    let k = assignments.unwrap_or(n.div_ceil(100));
    if k == 0 || k > n {
        return Err(CliError::Usage(format!("--assignments must be between 1 and {n}")));
    }
    let seed = ctx.seed();
    let records = generate(n, k, seed)?;
    let meta = Meta::new("gen", Some(seed)).with("n", n).with("assignments", k);
    let name = ctx.out().map(|p| p.display().to_string()).unwrap_or_else(|| "<stdout>".into());
    let mut out = create(ctx.out())?;
    let mut write = || -> std::io::Result<()> {
        use std::io::Write;
        writeln!(out, "{}", serde_json::json!({ "meta": meta }))?;
        for r in &records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    };
    write().map_err(|e| CliError::io(std::path::Path::new(&name), e))?;
    ctx.note(&format!("wrote {n} puzzles over {k} assignments"));
    Ok(())
}
