//! Test schedules: one printed, optionally many more validated.

use serde::{Deserialize, Serialize};

use hidden_single_core::rng::derive_seed;
use hidden_single_core::schedule::{check_schedule, schedule_test, TestSchedule, SET_SIZE};

use crate::error::{CliError, Result};
use crate::files::{write_table, Meta};
use crate::Ctx;

pub const COLUMNS: [&str; 7] = ["trial", "set", "ds_changed", "ht_changed", "hi_changed", "ci_changed", "goal_changed"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleRow {
    pub trial: usize,
    pub set: usize,
    pub ds_changed: bool,
    pub ht_changed: bool,
    pub hi_changed: bool,
    pub ci_changed: bool,
    pub goal_changed: bool,
}

pub fn rows(s: &TestSchedule) -> Vec<ScheduleRow> {
    s.trials()
        .iter()
        .enumerate()
        .map(|(i, c)| ScheduleRow {
            trial: i + 1,
            set: i / SET_SIZE + 1,
            ds_changed: c.ds_changed,
            ht_changed: c.ht_changed,
            hi_changed: c.hi_changed,
            ci_changed: c.ci_changed,
            goal_changed: c.goal_position_changed(),
        })
        .collect()
}

pub fn run(ctx: &Ctx, check_seeds: Option<u64>) -> Result<()> {
    let seed = ctx.seed();
    let schedule = schedule_test(seed);
    let mut problems: Vec<String> = check_schedule(&schedule).into_iter().map(|p| format!("seed {seed}: {p}")).collect();
    if let Some(k) = check_seeds {
        for i in 0..k {
            let s = derive_seed(seed, "schedule", i);
            problems.extend(check_schedule(&schedule_test(s)).into_iter().map(|p| format!("seed {s}: {p}")));
        }
        ctx.note(&format!("checked {} schedules", k + 1));
    }
    let meta = Meta::new("schedule", Some(seed));
    write_table(ctx.out(), ctx.format(), &meta, &COLUMNS, &rows(&schedule))?;
    for p in &problems {
        eprintln!("{p}");
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{} schedule violation(s)", problems.len())))
    }
}
