//! The experiment as an event-sourced state machine.
//!
//! A [`Session`] changes only through [`step_session`], which takes one
//! timestamped participant input. Times come from the server clock. Each
//! accepted input yields zero or more derived records (trial events and
//! questionnaire answers); inputs and records together form the journal, and
//! replaying the inputs of a journal rebuilds the session exactly.

pub mod diagnostic;
pub mod journal;
pub mod questionnaire;
pub mod screen;
pub mod tutorial;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feedback::{feedback_for, Feedback, FeedbackMode};
use crate::grid::Digit;
use crate::puzzle::{
    assign_participant, derive_condition_features_seeded, generate_puzzle, ConditionCombo, HiddenSinglePuzzle,
    ParticipantAssignment, PuzzleError, PuzzleFeatures, ResponseRole,
};
use crate::rng::{child_rng, derive_seed};
use crate::schedule::{schedule_test, TestSchedule};

use diagnostic::{diagnostic_reward, evaluate_diagnostic, DiagnosticError, DiagnosticPuzzle, DiagnosticSurvey, Eligibility, MiniGrid};
use questionnaire::{next_question, question, AnswerValue, Demographics, QuestionnaireRecord, ATTENTION_QUESTIONS};
use tutorial::{build_tutorial, TutorialAnswer, TutorialScript};

pub use journal::{replay, replay_prefix, JournalError, JournalRecord, SessionHeader};
pub use screen::{screen, Screen};

pub const FORMAT_VERSION: u32 = 1;
pub const PRACTICE_TRIALS: usize = 25;
pub const TEST_TRIALS: usize = crate::schedule::TEST_TRIALS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Diagnostic,
    Tutorial,
    Practice,
    Test,
    Questionnaire,
    Demographics,
    Done,
    ScreenedOut,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Diagnostic => "diagnostic",
            Phase::Tutorial => "tutorial",
            Phase::Practice => "practice",
            Phase::Test => "test",
            Phase::Questionnaire => "questionnaire",
            Phase::Demographics => "demographics",
            Phase::Done => "done",
            Phase::ScreenedOut => "screened_out",
        }
    }

    pub fn parse(s: &str) -> Option<Phase> {
        [
            Phase::Diagnostic,
            Phase::Tutorial,
            Phase::Practice,
            Phase::Test,
            Phase::Questionnaire,
            Phase::Demographics,
            Phase::Done,
            Phase::ScreenedOut,
        ]
        .into_iter()
        .find(|p| p.as_str() == s)
    }

    /// Whether `self -> next` is an allowed transition.
    pub fn may_become(self, next: Phase) -> bool {
        match (self, next) {
            (a, b) if a == b => true,
            (Phase::Diagnostic, Phase::ScreenedOut) => true,
            (_, Phase::ScreenedOut) | (Phase::ScreenedOut, _) => false,
            (a, b) => a < b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProtocolConfig {
    pub bonus_cents_per_solve: u32,
    pub diagnostic_base_cents: u32,
    pub diagnostic_penalty_cents: u32,
    pub time_limit_ms: u64,
    pub inter_trial_ms: u64,
    pub feedback_mode: FeedbackMode,
    pub diagnostic: DiagnosticPuzzle,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            bonus_cents_per_solve: 5,
            diagnostic_base_cents: 25,
            diagnostic_penalty_cents: 1,
            time_limit_ms: 120_000,
            inter_trial_ms: 10_000,
            feedback_mode: FeedbackMode::Corrected,
            diagnostic: DiagnosticPuzzle::default(),
        }
    }
}

/// A participant action. Which kinds are legal depends on the current screen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Input {
    DiagnosticAttempt { grid: MiniGrid },
    DiagnosticGiveUp,
    DiagnosticSurvey { survey: DiagnosticSurvey },
    Tutorial { answer: TutorialAnswer },
    /// A digit for the goal cell; `None` submits a blank.
    Answer { digit: Option<Digit> },
    Timeout,
    Continue,
    AttentionCheck { answers: Vec<String> },
    Question { number: u8, answer: AnswerValue },
    Demographics { demographics: Demographics },
}

impl Input {
    pub fn name(&self) -> &'static str {
        match self {
            Input::DiagnosticAttempt { .. } => "diagnostic_attempt",
            Input::DiagnosticGiveUp => "diagnostic_give_up",
            Input::DiagnosticSurvey { .. } => "diagnostic_survey",
            Input::Tutorial { .. } => "tutorial",
            Input::Answer { .. } => "answer",
            Input::Timeout => "timeout",
            Input::Continue => "continue",
            Input::AttentionCheck { .. } => "attention_check",
            Input::Question { .. } => "question",
            Input::Demographics { .. } => "demographics",
        }
    }
}

/// An input stamped with the server clock. The client's own timestamp is
/// kept for reference only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedInput {
    pub at_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client_ms: Option<u64>,
    #[serde(flatten)]
    pub input: Input,
}

impl TimedInput {
    pub fn new(at_ms: u64, input: Input) -> Self {
        TimedInput { at_ms, client_ms: None, input }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialEvent {
    pub phase: Phase,
    /// 1-based within the phase.
    pub trial_index: usize,
    pub puzzle_id: String,
    pub condition: ConditionCombo,
    pub response: Option<Digit>,
    pub role: Option<ResponseRole>,
    pub correct: bool,
    pub attempt_number: u32,
    pub rt_ms: u64,
    pub wall_time_ms: u64,
    #[serde(default)]
    pub timed_out: bool,
}

/// Non-trial answers worth keeping as their own journal lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "item", rename_all = "snake_case")]
pub enum AnswerRecord {
    Diagnostic { solved: bool, wrong_attempts: u32, survey: DiagnosticSurvey, eligibility: Eligibility },
    Tutorial { step: usize, correct: bool },
    Attention { answers: Vec<String> },
    PuzzleResponse { digit: Digit, role: ResponseRole },
    Question { number: u8, value: AnswerValue },
    Demographics { demographics: Demographics },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Derived {
    Trial(TrialEvent),
    Answer { wall_time_ms: u64, #[serde(flatten)] answer: AnswerRecord },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("{event} is not accepted on the {screen} screen")]
    IllegalEvent { event: &'static str, screen: &'static str },
    #[error("the session has finished")]
    Finished,
    #[error("timestamp {at_ms} is earlier than the previous event at {last_ms}")]
    ClockRegression { at_ms: u64, last_ms: u64 },
    #[error("test trial {trial} has already been answered")]
    DuplicateAttempt { trial: usize },
    #[error("the time limit expired {elapsed_ms} ms after the trial started")]
    ExpiredTimer { elapsed_ms: u64 },
    #[error("the time limit has {remaining_ms} ms left")]
    TimerRunning { remaining_ms: u64 },
    #[error("the wait before the next trial has {remaining_ms} ms left")]
    WaitRunning { remaining_ms: u64 },
    #[error("expected an answer to question {expected}, got question {got}")]
    WrongQuestion { expected: u8, got: u8 },
    #[error("invalid answer: {0}")]
    InvalidAnswer(String),
    #[error("diagnostic puzzle: {0}")]
    Diagnostic(#[from] DiagnosticError),
    #[error("puzzle generation: {0}")]
    Puzzle(#[from] PuzzleError),
}

impl ProtocolError {
    /// Stable machine-readable reason.
    pub fn code(&self) -> &'static str {
        match self {
            ProtocolError::IllegalEvent { .. } => "illegal_event",
            ProtocolError::Finished => "session_finished",
            ProtocolError::ClockRegression { .. } => "clock_regression",
            ProtocolError::DuplicateAttempt { .. } => "duplicate_attempt",
            ProtocolError::ExpiredTimer { .. } => "expired_timer",
            ProtocolError::TimerRunning { .. } => "timer_running",
            ProtocolError::WaitRunning { .. } => "wait_running",
            ProtocolError::WrongQuestion { .. } => "wrong_question",
            ProtocolError::InvalidAnswer(_) => "invalid_answer",
            ProtocolError::Diagnostic(_) => "bad_diagnostic",
            ProtocolError::Puzzle(_) => "generation_failure",
        }
    }

    /// Errors caused by the request rather than by the server.
    pub fn is_client_error(&self) -> bool {
        !matches!(self, ProtocolError::Diagnostic(_) | ProtocolError::Puzzle(_))
    }
}

/// Where the participant is, finer-grained than [`Phase`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Stage {
    DiagnosticPuzzle,
    DiagnosticSurvey,
    Tutorial { step: usize, hint: Option<String> },
    /// `trial` is 0-based.
    Practice { trial: usize, attempts: u32, started_ms: u64, feedback: Option<Feedback> },
    Test { trial: usize, started_ms: u64 },
    TestWait { trial: usize, correct: bool, ready_at_ms: u64 },
    AttentionCheck,
    QuestionnairePuzzle,
    Question { number: u8 },
    Demographics,
    Done,
    ScreenedOut { demographics_done: bool },
}

impl Stage {
    pub fn phase(&self) -> Phase {
        match self {
            Stage::DiagnosticPuzzle | Stage::DiagnosticSurvey => Phase::Diagnostic,
            Stage::Tutorial { .. } => Phase::Tutorial,
            Stage::Practice { .. } => Phase::Practice,
            Stage::Test { .. } | Stage::TestWait { .. } => Phase::Test,
            Stage::AttentionCheck | Stage::QuestionnairePuzzle | Stage::Question { .. } => Phase::Questionnaire,
            Stage::Demographics => Phase::Demographics,
            Stage::Done => Phase::Done,
            Stage::ScreenedOut { .. } => Phase::ScreenedOut,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Stage::DiagnosticPuzzle => "diagnostic_puzzle",
            Stage::DiagnosticSurvey => "diagnostic_survey",
            Stage::Tutorial { .. } => "tutorial",
            Stage::Practice { .. } => "practice",
            Stage::Test { .. } => "test",
            Stage::TestWait { .. } => "test_wait",
            Stage::AttentionCheck => "attention_check",
            Stage::QuestionnairePuzzle => "questionnaire_puzzle",
            Stage::Question { .. } => "question",
            Stage::Demographics => "demographics",
            Stage::Done => "done",
            Stage::ScreenedOut { .. } => "screened_out",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticState {
    pub wrong_attempts: u32,
    pub solved_grid: Option<MiniGrid>,
    pub survey: Option<DiagnosticSurvey>,
    pub eligibility: Option<Eligibility>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub seed: u64,
    pub created_ms: u64,
    pub config: ProtocolConfig,
    pub assignment: ParticipantAssignment,
    pub schedule: TestSchedule,
    pub stage: Stage,
    /// Append-only.
    pub events: Vec<TrialEvent>,
    pub diagnostic: DiagnosticState,
    pub tutorial: Option<TutorialScript>,
    /// Puzzle on screen during practice, test or the questionnaire.
    pub puzzle: Option<HiddenSinglePuzzle>,
    pub questionnaire: Option<QuestionnaireRecord>,
    pub demographics: Option<Demographics>,
    pub bonus_cents: u32,
    pub last_ms: u64,
}

pub fn practice_puzzle(a: &ParticipantAssignment, seed: u64, trial: usize) -> Result<HiddenSinglePuzzle, PuzzleError> {
    generate_puzzle(&a.training, derive_seed(seed, "practice", trial as u64))
}

pub fn test_puzzle(
    a: &ParticipantAssignment,
    schedule: &TestSchedule,
    seed: u64,
    trial: usize,
) -> Result<HiddenSinglePuzzle, PuzzleError> {
    let condition = schedule.trials()[trial];
    let f = derive_condition_features_seeded(a, condition, derive_seed(seed, "test-features", trial as u64));
    let mut p = generate_puzzle(&f, derive_seed(seed, "test", trial as u64))?;
    p.condition = condition;
    Ok(p)
}

/// Training house type and digit set with the goal somewhere in the centre box.
pub fn questionnaire_puzzle(a: &ParticipantAssignment, seed: u64) -> Result<HiddenSinglePuzzle, PuzzleError> {
    let mut rng = child_rng(seed, "questionnaire", 0);
    let t = a.training;
    let f = PuzzleFeatures::new(t.house_type, rng.gen_range(4..=6), rng.gen_range(4..=6), t.digit_set)?;
    let mut p = generate_puzzle(&f, derive_seed(seed, "questionnaire-puzzle", 0))?;
    p.condition = ConditionCombo {
        ds_changed: false,
        ht_changed: false,
        hi_changed: f.house_index != t.house_index,
        ci_changed: f.cell_index != t.cell_index,
    };
    Ok(p)
}

pub fn puzzle_id(phase: Phase, trial: usize) -> String {
    format!("{}-{trial:02}", phase.as_str())
}

impl Session {
    pub fn new(id: impl Into<String>, seed: u64, created_ms: u64, config: ProtocolConfig) -> Result<Self, ProtocolError> {
        config.diagnostic.validate()?;
        Ok(Session {
            id: id.into(),
            seed,
            created_ms,
            assignment: assign_participant(derive_seed(seed, "assignment", 0)),
            schedule: schedule_test(derive_seed(seed, "schedule", 0)),
            config,
            stage: Stage::DiagnosticPuzzle,
            events: Vec::new(),
            diagnostic: DiagnosticState::default(),
            tutorial: None,
            puzzle: None,
            questionnaire: None,
            demographics: None,
            bonus_cents: 0,
            last_ms: created_ms,
        })
    }

    pub fn phase(&self) -> Phase {
        self.stage.phase()
    }

    pub fn is_finished(&self) -> bool {
        matches!(self.stage, Stage::Done | Stage::ScreenedOut { demographics_done: true })
    }

    pub fn header(&self) -> SessionHeader {
        SessionHeader {
            format_version: FORMAT_VERSION,
            session_id: self.id.clone(),
            seed: self.seed,
            created_ms: self.created_ms,
            config: self.config.clone(),
        }
    }

    fn illegal(&self, input: &Input) -> ProtocolError {
        ProtocolError::IllegalEvent { event: input.name(), screen: self.stage.name() }
    }

    fn start_practice(&mut self, trial: usize, at: u64) -> Result<(), ProtocolError> {
        self.puzzle = Some(practice_puzzle(&self.assignment, self.seed, trial)?);
        self.stage = Stage::Practice { trial, attempts: 0, started_ms: at, feedback: None };
        Ok(())
    }

    fn start_test(&mut self, trial: usize, at: u64) -> Result<(), ProtocolError> {
        self.puzzle = Some(test_puzzle(&self.assignment, &self.schedule, self.seed, trial)?);
        self.stage = Stage::Test { trial, started_ms: at };
        Ok(())
    }

    fn trial_event(&self, phase: Phase, trial: usize, digit: Option<Digit>, attempt: u32, rt: u64, at: u64) -> TrialEvent {
        let p = self.puzzle.as_ref().expect("a puzzle is on screen");
        let role = digit.map(|d| p.role_of(d));
        TrialEvent {
            phase,
            trial_index: trial + 1,
            puzzle_id: puzzle_id(phase, trial + 1),
            condition: p.condition,
            response: digit,
            role,
            correct: role == Some(ResponseRole::Target),
            attempt_number: attempt,
            rt_ms: rt,
            wall_time_ms: at,
            timed_out: false,
        }
    }

    fn apply(&mut self, timed: &TimedInput) -> Result<Vec<Derived>, ProtocolError> {
        let at = timed.at_ms;
        if self.is_finished() {
            return Err(ProtocolError::Finished);
        }
        if at < self.last_ms {
            return Err(ProtocolError::ClockRegression { at_ms: at, last_ms: self.last_ms });
        }
        let input = &timed.input;
        let mut out = Vec::new();
        let answer = |a: AnswerRecord| Derived::Answer { wall_time_ms: at, answer: a };

        match (self.stage.clone(), input) {
            (Stage::DiagnosticPuzzle, Input::DiagnosticAttempt { grid }) => {
                if self.config.diagnostic.is_solved_by(grid) {
                    self.diagnostic.solved_grid = Some(*grid);
                    self.stage = Stage::DiagnosticSurvey;
                } else {
                    self.diagnostic.wrong_attempts += 1;
                }
            }
            (Stage::DiagnosticPuzzle, Input::DiagnosticGiveUp) => self.stage = Stage::DiagnosticSurvey,
            (Stage::DiagnosticSurvey, Input::DiagnosticSurvey { survey }) => {
                let eligibility = evaluate_diagnostic(&self.config.diagnostic, self.diagnostic.solved_grid.as_ref(), survey);
                self.diagnostic.survey = Some(*survey);
                self.diagnostic.eligibility = Some(eligibility);
                out.push(answer(AnswerRecord::Diagnostic {
                    solved: self.diagnostic.solved_grid.is_some(),
                    wrong_attempts: self.diagnostic.wrong_attempts,
                    survey: *survey,
                    eligibility,
                }));
                match eligibility {
                    Eligibility::Eligible => {
                        self.tutorial = Some(build_tutorial(&self.assignment, self.seed)?);
                        self.stage = Stage::Tutorial { step: 0, hint: None };
                    }
                    Eligibility::ScreenedOut => self.stage = Stage::ScreenedOut { demographics_done: false },
                }
            }
            (Stage::Tutorial { step, .. }, Input::Tutorial { answer: a }) => {
                let script = self.tutorial.as_ref().expect("tutorial built on entry");
                let s = &script.steps[step];
                let correct = s.accepts(a);
                if !matches!(a, TutorialAnswer::Acknowledge) || !correct {
                    out.push(answer(AnswerRecord::Tutorial { step: step + 1, correct }));
                }
                if correct {
                    if step + 1 == script.steps.len() {
                        self.start_practice(0, at)?;
                    } else {
                        self.stage = Stage::Tutorial { step: step + 1, hint: None };
                    }
                } else {
                    let hint = s.hint_for(a, script.puzzle.house_type().noun());
                    self.stage = Stage::Tutorial { step, hint };
                }
            }
            (Stage::Practice { trial, attempts, started_ms, .. }, Input::Answer { digit }) => {
                let Some(d) = digit else {
                    return Err(ProtocolError::InvalidAnswer("practice trials need a digit".into()));
                };
                let ev = self.trial_event(Phase::Practice, trial, Some(*d), attempts + 1, at - started_ms, at);
                let correct = ev.correct;
                if correct && attempts == 0 {
                    self.bonus_cents += self.config.bonus_cents_per_solve;
                }
                self.events.push(ev.clone());
                out.push(Derived::Trial(ev));
                if correct {
                    if trial + 1 == PRACTICE_TRIALS {
                        self.start_test(0, at)?;
                    } else {
                        self.start_practice(trial + 1, at)?;
                    }
                } else {
                    let p = self.puzzle.as_ref().expect("practice puzzle");
                    let fb = feedback_for(p, *d, self.config.feedback_mode);
                    self.stage = Stage::Practice { trial, attempts: attempts + 1, started_ms, feedback: Some(fb) };
                }
            }
            (Stage::Test { trial, started_ms }, Input::Answer { digit }) => {
                let elapsed = at - started_ms;
                if elapsed > self.config.time_limit_ms {
                    return Err(ProtocolError::ExpiredTimer { elapsed_ms: elapsed });
                }
                let ev = self.trial_event(Phase::Test, trial, *digit, 1, elapsed, at);
                self.finish_test_trial(ev, at, &mut out);
            }
            (Stage::Test { trial, started_ms }, Input::Timeout) => {
                let elapsed = at - started_ms;
                if elapsed < self.config.time_limit_ms {
                    return Err(ProtocolError::TimerRunning { remaining_ms: self.config.time_limit_ms - elapsed });
                }
                let mut ev = self.trial_event(Phase::Test, trial, None, 1, self.config.time_limit_ms, at);
                ev.timed_out = true;
                self.finish_test_trial(ev, at, &mut out);
            }
            (Stage::TestWait { trial, .. }, Input::Answer { .. } | Input::Timeout) => {
                return Err(ProtocolError::DuplicateAttempt { trial: trial + 1 });
            }
            (Stage::TestWait { trial, correct, ready_at_ms }, Input::Continue) => {
                if !correct && at < ready_at_ms {
                    return Err(ProtocolError::WaitRunning { remaining_ms: ready_at_ms - at });
                }
                if trial + 1 == TEST_TRIALS {
                    self.puzzle = None;
                    self.stage = Stage::AttentionCheck;
                } else {
                    self.start_test(trial + 1, at)?;
                }
            }
            (Stage::AttentionCheck, Input::AttentionCheck { answers }) => {
                if answers.len() != ATTENTION_QUESTIONS || answers.iter().any(|a| a.trim().is_empty()) {
                    return Err(ProtocolError::InvalidAnswer(format!(
                        "all {ATTENTION_QUESTIONS} attention questions need an answer"
                    )));
                }
                let p = questionnaire_puzzle(&self.assignment, self.seed)?;
                let mut record = QuestionnaireRecord::new(p.clone());
                record.attention = answers.clone();
                self.questionnaire = Some(record);
                self.puzzle = Some(p);
                out.push(answer(AnswerRecord::Attention { answers: answers.clone() }));
                self.stage = Stage::QuestionnairePuzzle;
            }
            (Stage::QuestionnairePuzzle, Input::Answer { digit }) => {
                let Some(d) = digit else {
                    return Err(ProtocolError::InvalidAnswer("the questionnaire puzzle needs a digit".into()));
                };
                let q = self.questionnaire.as_mut().expect("record created with the attention check");
                q.response = Some(*d);
                let role = q.puzzle.role_of(*d);
                out.push(answer(AnswerRecord::PuzzleResponse { digit: *d, role }));
                self.stage = Stage::Question { number: 1 };
            }
            (Stage::Question { number }, Input::Question { number: got, answer: value }) => {
                if *got != number {
                    return Err(ProtocolError::WrongQuestion { expected: number, got: *got });
                }
                let q = question(number).expect("question numbers stay in range");
                if !value.fits(q) {
                    return Err(ProtocolError::InvalidAnswer(format!("question {number} expects a {:?} answer", q.kind)));
                }
                let record = self.questionnaire.as_mut().expect("questionnaire in progress");
                record.answers.insert(number, value.clone());
                out.push(answer(AnswerRecord::Question { number, value: value.clone() }));
                self.stage = match next_question(number, value, record.response_role()) {
                    Some(n) => Stage::Question { number: n },
                    None => Stage::Demographics,
                };
            }
            (Stage::Demographics, Input::Demographics { demographics }) => {
                self.demographics = Some(demographics.clone());
                out.push(answer(AnswerRecord::Demographics { demographics: demographics.clone() }));
                self.puzzle = None;
                self.stage = Stage::Done;
            }
            (Stage::ScreenedOut { demographics_done: false }, Input::Demographics { demographics }) => {
                self.demographics = Some(demographics.clone());
                out.push(answer(AnswerRecord::Demographics { demographics: demographics.clone() }));
                self.stage = Stage::ScreenedOut { demographics_done: true };
            }
            _ => return Err(self.illegal(input)),
        }
        self.last_ms = at;
        Ok(out)
    }

    fn finish_test_trial(&mut self, ev: TrialEvent, at: u64, out: &mut Vec<Derived>) {
        let trial = ev.trial_index - 1;
        let correct = ev.correct;
        if correct {
            self.bonus_cents += self.config.bonus_cents_per_solve;
        }
        self.events.push(ev.clone());
        out.push(Derived::Trial(ev));
        self.stage = Stage::TestWait { trial, correct, ready_at_ms: at + self.config.inter_trial_ms };
    }
}

/// Applies one input. On error the session is left untouched.
pub fn step_session(s: &mut Session, input: &TimedInput) -> Result<Vec<Derived>, ProtocolError> {
    let mut next = s.clone();
    let out = next.apply(input)?;
    debug_assert!(s.phase().may_become(next.phase()));
    *s = next;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    /// First-attempt correctness per practice trial.
    pub practice_first_attempt: Vec<bool>,
    pub test_correct: Vec<bool>,
    pub practice_accuracy: Option<f64>,
    pub test_accuracy: Option<f64>,
    pub first_attempt_solves: u32,
    pub bonus_cents: u32,
    pub diagnostic_reward_cents: u32,
}

fn rate(v: &[bool]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().filter(|&&x| x).count() as f64 / v.len() as f64)
}

pub fn score_session(s: &Session) -> ScoreSummary {
    let practice_first_attempt: Vec<bool> =
        s.events.iter().filter(|e| e.phase == Phase::Practice && e.attempt_number == 1).map(|e| e.correct).collect();
    let test_correct: Vec<bool> = s.events.iter().filter(|e| e.phase == Phase::Test).map(|e| e.correct).collect();
    let first_attempt_solves =
        (practice_first_attempt.iter().chain(&test_correct).filter(|&&c| c).count()) as u32;
    ScoreSummary {
        practice_accuracy: rate(&practice_first_attempt),
        test_accuracy: rate(&test_correct),
        bonus_cents: first_attempt_solves * s.config.bonus_cents_per_solve,
        diagnostic_reward_cents: diagnostic_reward(
            s.diagnostic.solved_grid.is_some(),
            s.diagnostic.wrong_attempts,
            s.config.diagnostic_base_cents,
            s.config.diagnostic_penalty_cents,
        ),
        first_attempt_solves,
        practice_first_attempt,
        test_correct,
    }
}
