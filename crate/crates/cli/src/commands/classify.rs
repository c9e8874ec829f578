//! Participant labels from practice and test accuracy.

use std::path::Path;

use serde::{Deserialize, Serialize};

use hidden_single_core::analysis::classify_participant;
use hidden_single_core::export::ParticipantData;
use hidden_single_core::puzzle::ResponseRole;

use crate::commands::{data_seed, load_participants};
use crate::error::Result;
use crate::files::{write_table, Meta};
use crate::Ctx;

pub const COLUMNS: [&str; 9] = [
    "session",
    "practice_trials",
    "practice_correct",
    "test_trials",
    "test_correct",
    "solver",
    "persistent_solver",
    "pd_guesser",
    "error",
];

/// Labels are empty when a participant has too few trials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyRow {
    pub session: String,
    pub practice_trials: usize,
    pub practice_correct: usize,
    pub test_trials: usize,
    pub test_correct: usize,
    pub solver: Option<bool>,
    pub persistent_solver: Option<bool>,
    pub pd_guesser: Option<bool>,
    pub error: Option<String>,
}

pub fn classify(d: &ParticipantData) -> ClassifyRow {
    let test = d.test_roles_filled();
    let correct = |rs: &[ResponseRole]| rs.iter().filter(|&&r| r == ResponseRole::Target).count();
    let mut row = ClassifyRow {
        session: d.session.clone(),
        practice_trials: d.practice.len(),
        practice_correct: correct(&d.practice),
        test_trials: test.len(),
        test_correct: correct(&test),
        solver: None,
        persistent_solver: None,
        pd_guesser: None,
        error: None,
    };
    match classify_participant(&d.practice, &test) {
        Ok(c) => {
            row.solver = Some(c.solver);
            row.persistent_solver = Some(c.persistent_solver);
            row.pd_guesser = Some(c.pd_guesser);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

pub fn run(ctx: &Ctx, input: &Path) -> Result<()> {
    let (input_meta, participants) = load_participants(input)?;
    let rows: Vec<ClassifyRow> = participants.iter().map(classify).collect();
    let count = |f: fn(&ClassifyRow) -> Option<bool>| rows.iter().filter(|r| f(r) == Some(true)).count();
    let meta = Meta::new("classify", data_seed(ctx, input_meta.as_ref())).with("input", input.display().to_string());
    write_table(ctx.out(), ctx.format(), &meta, &COLUMNS, &rows)?;
    ctx.note(&format!(
        "{} participants: {} solvers, {} persistent solvers, {} guessers, {} unclassified",
        rows.len(),
        count(|r| r.solver),
        count(|r| r.persistent_solver),
        count(|r| r.pd_guesser),
        rows.iter().filter(|r| r.error.is_some()).count()
    ));
    Ok(())
}
