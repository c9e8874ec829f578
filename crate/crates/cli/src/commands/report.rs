//! Condition summaries of test-phase accuracy and response times.

use std::path::Path;

use hidden_single_core::analysis::{condition_summary, TestTrial};

use crate::args::Group;
use crate::commands::classify::classify;
use crate::commands::load_participants;
use crate::error::Result;
use crate::files::{write_table, Meta};
use crate::Ctx;

pub const COLUMNS: [&str; 11] = [
    "factor",
    "changed",
    "set",
    "n",
    "accuracy",
    "accuracy_lo",
    "accuracy_hi",
    "rt_n",
    "mean_log2_rt",
    "rt_lo",
    "rt_hi",
];

pub fn run(ctx: &Ctx, input: &Path, group: Group) -> Result<()> {
    let (_, participants) = load_participants(input)?;
    let selected: Vec<_> = participants
        .iter()
        .filter(|d| match group {
            Group::All => true,
            Group::Solvers => classify(d).solver == Some(true),
            Group::NonSolvers => classify(d).solver == Some(false),
        })
        .collect();
    let trials: Vec<TestTrial> = selected.iter().flat_map(|d| d.test.iter().cloned()).collect();
    let seed = ctx.seed();
    let meta = Meta::new("report", Some(seed))
        .with("input", input.display().to_string())
        .with("group", format!("{group:?}").to_lowercase())
        .with("participants", selected.len());
    write_table(ctx.out(), ctx.format(), &meta, &COLUMNS, &condition_summary(&trials, seed))?;
    ctx.note(&format!("summarized {} participants, {} test trials", selected.len(), trials.len()));
    Ok(())
}
