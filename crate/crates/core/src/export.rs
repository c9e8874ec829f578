//! Flat per-trial CSV shared by recorded sessions and synthetic cohorts, so
//! the analysis commands run on either.
//!
//! One row per trial. `role`, `correct` and `rt_ms` describe the first
//! attempt; `attempts` counts all of them. Rows are grouped back into
//! per-participant sequences with [`group_rows`].

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};

use crate::agents::SyntheticParticipant;
use crate::analysis::TestTrial;
use crate::model::StrategyClass;
use crate::protocol::{Phase, Session, TrialEvent};
use crate::puzzle::{ConditionCombo, ResponseRole};
use crate::rng::derive_seed;
use crate::schedule::schedule_test;

pub const EXPORT_COLUMNS: [&str; 11] =
    ["session", "phase", "trial", "ds_changed", "ht_changed", "hi_changed", "ci_changed", "role", "correct", "rt_ms", "attempts"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportRow {
    pub session: String,
    pub phase: Phase,
    pub trial: usize,
    pub ds_changed: bool,
    pub ht_changed: bool,
    pub hi_changed: bool,
    pub ci_changed: bool,
    pub role: Option<ResponseRole>,
    pub correct: bool,
    pub rt_ms: Option<u64>,
    pub attempts: u32,
}

impl ExportRow {
    fn new(session: &str, phase: Phase, trial: usize, c: ConditionCombo) -> Self {
        ExportRow {
            session: session.to_string(),
            phase,
            trial,
            ds_changed: c.ds_changed,
            ht_changed: c.ht_changed,
            hi_changed: c.hi_changed,
            ci_changed: c.ci_changed,
            role: None,
            correct: false,
            rt_ms: None,
            attempts: 0,
        }
    }

    pub fn condition(&self) -> ConditionCombo {
        ConditionCombo {
            ds_changed: self.ds_changed,
            ht_changed: self.ht_changed,
            hi_changed: self.hi_changed,
            ci_changed: self.ci_changed,
        }
    }
}

fn trial_rows(session: &str, events: &[TrialEvent]) -> Vec<ExportRow> {
    let mut rows: Vec<ExportRow> = Vec::new();
    for e in events {
        match rows.last_mut() {
            Some(r) if r.phase == e.phase && r.trial == e.trial_index => r.attempts += 1,
            _ => {
                let mut r = ExportRow::new(session, e.phase, e.trial_index, e.condition);
                r.role = e.role;
                r.correct = e.correct;
                r.rt_ms = Some(e.rt_ms);
                r.attempts = 1;
                rows.push(r);
            }
        }
    }
    rows
}

/// Practice and test trials of a session, plus one row for the
/// questionnaire puzzle once it has been answered.
pub fn session_rows(s: &Session) -> Vec<ExportRow> {
    let mut rows = trial_rows(&s.id, &s.events);
    if let Some(q) = &s.questionnaire {
        if let Some(d) = q.response {
            let mut r = ExportRow::new(&s.id, Phase::Questionnaire, 1, q.puzzle.condition);
            let role = q.puzzle.role_of(d);
            r.role = Some(role);
            r.correct = role == ResponseRole::Target;
            r.attempts = 1;
            rows.push(r);
        }
    }
    rows
}

pub fn agent_session_id(id: usize) -> String {
    format!("agent-{id:04}")
}

/// Test-phase conditions assigned to a synthetic agent.
pub fn agent_schedule(seed: u64, id: usize) -> Vec<ConditionCombo> {
    schedule_test(derive_seed(seed, "schedule", id as u64)).trials().to_vec()
}

/// Synthetic responses as export rows. The first `practice_trials` responses
/// form the practice phase; the rest are test trials with conditions from a
/// per-agent schedule. Agents have no response times.
pub fn synthetic_rows(cohort: &[SyntheticParticipant], practice_trials: usize, seed: u64) -> Vec<ExportRow> {
    let mut rows = Vec::new();
    for agent in cohort {
        let sid = agent_session_id(agent.id);
        let schedule = agent_schedule(seed, agent.id);
        for (t, &role) in agent.responses.iter().enumerate() {
            let (phase, trial, cond) = if t < practice_trials {
                (Phase::Practice, t + 1, ConditionCombo::CONTROL)
            } else {
                let k = t - practice_trials;
                (Phase::Test, k + 1, schedule.get(k).copied().unwrap_or_default())
            };
            let mut r = ExportRow::new(&sid, phase, trial, cond);
            r.role = Some(role);
            r.correct = role == ResponseRole::Target;
            r.attempts = 1;
            rows.push(r);
        }
    }
    rows
}

/// Hidden strategy of each synthetic response, for scoring inference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRow {
    pub session: String,
    pub phase: Phase,
    pub trial: usize,
    pub strategy: StrategyClass,
}

pub fn path_rows(cohort: &[SyntheticParticipant], practice_trials: usize) -> Vec<PathRow> {
    cohort
        .iter()
        .flat_map(|a| {
            let sid = agent_session_id(a.id);
            a.path.classes().iter().enumerate().map(move |(t, &strategy)| {
                let (phase, trial) =
                    if t < practice_trials { (Phase::Practice, t + 1) } else { (Phase::Test, t - practice_trials + 1) };
                PathRow { session: sid.clone(), phase, trial, strategy }
            })
        })
        .collect()
}

/// Writes rows under the fixed header; an empty slice yields the header alone.
pub fn write_rows<W: io::Write, T: Serialize>(rows: &[T], columns: &[&str], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(columns)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_export<W: io::Write>(rows: &[ExportRow], out: W) -> csv::Result<()> {
    write_rows(rows, &EXPORT_COLUMNS, out)
}

/// Reads rows written by [`write_export`]. Lines starting with `#` are
/// skipped, so files may carry a metadata comment.
pub fn read_export<R: io::Read>(input: R) -> csv::Result<Vec<ExportRow>> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input).deserialize().collect()
}

/// One participant's trials, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticipantData {
    pub session: String,
    pub practice: Vec<ResponseRole>,
    /// `None` for blank or timed-out test trials.
    pub test_roles: Vec<Option<ResponseRole>>,
    pub test: Vec<TestTrial>,
}

impl ParticipantData {
    /// Test roles for the classifiers; a blank is neither correct nor a
    /// prevalent digit, which is what `Absent` encodes.
    pub fn test_roles_filled(&self) -> Vec<ResponseRole> {
        self.test_roles.iter().map(|r| r.unwrap_or(ResponseRole::Absent)).collect()
    }
}

pub fn group_rows(rows: &[ExportRow]) -> Vec<ParticipantData> {
    let mut by: BTreeMap<&str, Vec<&ExportRow>> = BTreeMap::new();
    for r in rows {
        by.entry(&r.session).or_default().push(r);
    }
    by.into_iter()
        .map(|(session, mut rs)| {
            rs.sort_by_key(|r| (r.phase, r.trial));
            let practice = rs.iter().filter(|r| r.phase == Phase::Practice).filter_map(|r| r.role).collect();
            let tests: Vec<&&ExportRow> = rs.iter().filter(|r| r.phase == Phase::Test).collect();
            ParticipantData {
                session: session.to_string(),
                practice,
                test_roles: tests.iter().map(|r| r.role).collect(),
                test: tests
                    .iter()
                    .map(|r| TestTrial {
                        participant: session.to_string(),
                        trial: r.trial,
                        condition: r.condition(),
                        correct: r.correct,
                        rt_ms: r.rt_ms,
                    })
                    .collect(),
            }
        })
        .collect()
}
