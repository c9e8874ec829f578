//! One module per subcommand.

pub mod classify;
pub mod fit;
pub mod gen;
pub mod infer;
pub mod prompts;
pub mod report;
pub mod schedule;
pub mod serve;
pub mod simulate;
pub mod verify;

use std::path::Path;

use hidden_single_core::export::{group_rows, ExportRow, ParticipantData};
use hidden_single_core::puzzle::ResponseRole;

use crate::args::SequencePhase;
use crate::error::{CliError, Result};
use crate::files::{read_table, Meta};
use crate::Ctx;

/// Per-trial rows from `simulate` or the service export, by participant.
pub fn load_participants(path: &Path) -> Result<(Option<Meta>, Vec<ParticipantData>)> {
    let (meta, rows) = read_table::<ExportRow>(path)?;
    if rows.is_empty() {
        return Err(CliError::Validation(format!("{}: no rows", path.display())));
    }
    Ok((meta, group_rows(&rows)))
}

/// Seed recorded by commands that draw nothing themselves: the one given,
/// else the one the input was made with.
pub fn data_seed(ctx: &Ctx, input: Option<&Meta>) -> Option<u64> {
    ctx.seed_if_set().or_else(|| input.and_then(|m| m.seed))
}

pub fn sequence(p: &ParticipantData, phase: SequencePhase) -> Vec<ResponseRole> {
    match phase {
        SequencePhase::Practice => p.practice.clone(),
        SequencePhase::Test => p.test_roles_filled(),
        SequencePhase::All => p.practice.iter().copied().chain(p.test_roles_filled()).collect(),
    }
}
