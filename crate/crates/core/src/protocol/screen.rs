//! What the participant sees next. A screen carries everything needed to
//! render it (grids, highlights, texts, timers), so a client needs no task
//! logic of its own.

use serde::{Deserialize, Serialize};

use super::diagnostic::{CompletedCount, MiniGrid, YesNoUnsure, SURVEY_QUESTIONS};
use super::questionnaire::{
    question, AnswerValue, DegreeStatus, Education, MathTopic, QuestionKind, DEGREE_STATUS_QUESTION,
    EDUCATION_QUESTION, MATH_QUESTION,
};
use super::tutorial::{Expected, Panel, StepKind};
use super::{Phase, Session, Stage, FORMAT_VERSION, PRACTICE_TRIALS, TEST_TRIALS};
use crate::feedback::{Color, Feedback, Highlight};
use crate::grid::{Coord, Digit, House};
use crate::puzzle::HiddenSinglePuzzle;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub row: u8,
    pub col: u8,
    pub digit: Digit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuzzleView {
    /// 81 characters, row-major, `0` for empty.
    pub grid: String,
    pub givens: Vec<Cell>,
    pub goal: Coord,
    pub house: House,
    /// Goal in green, the other empty house cells in blue.
    pub highlights: Vec<Highlight>,
}

impl PuzzleView {
    pub fn of(p: &HiddenSinglePuzzle) -> Self {
        let mut highlights = vec![Highlight { coord: p.goal, color: Color::Green }];
        highlights.extend(p.blue_cells().into_iter().map(|coord| Highlight { coord, color: Color::Blue }));
        highlights.sort_by_key(|h| (h.coord.row(), h.coord.col()));
        PuzzleView {
            grid: p.grid.to_compact(),
            givens: p.grid.filled().map(|(c, digit)| Cell { row: c.row(), col: c.col(), digit }).collect(),
            goal: p.goal,
            house: p.target_house,
            highlights,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choices {
    pub text: String,
    pub options: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Acknowledge,
    Cells,
    Digit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "screen", rename_all = "snake_case")]
pub enum Screen {
    DiagnosticPuzzle {
        givens: MiniGrid,
        wrong_attempts: u32,
        reward_cents: u32,
    },
    DiagnosticSurvey {
        questions: Vec<Choices>,
    },
    Tutorial {
        /// 1-based.
        step: usize,
        total: usize,
        kind: StepKind,
        text: String,
        panels: Vec<Panel>,
        input: InputKind,
        hint: Option<String>,
    },
    Practice {
        trial: usize,
        total: usize,
        puzzle: PuzzleView,
        attempts: u32,
        feedback: Option<Feedback>,
        bonus_cents: u32,
    },
    Test {
        trial: usize,
        total: usize,
        puzzle: PuzzleView,
        started_ms: u64,
        deadline_ms: u64,
        remaining_ms: u64,
    },
    TestResult {
        trial: usize,
        total: usize,
        correct: bool,
        ready_at_ms: u64,
        remaining_ms: u64,
        can_skip: bool,
    },
    AttentionCheck {
        questions: usize,
    },
    QuestionnairePuzzle {
        puzzle: PuzzleView,
    },
    Question {
        number: u8,
        kind: QuestionKind,
        text: String,
        options: Vec<String>,
        puzzle: PuzzleView,
        response: Option<Digit>,
        /// Cells picked in question 5, shown again with question 6.
        selected_cells: Vec<Coord>,
    },
    Demographics {
        education: Choices,
        degree_status: Choices,
        math_topics: Choices,
    },
    Done {
        completed_experiment: bool,
        solved: u32,
        puzzles: usize,
        bonus_cents: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenPayload {
    pub format_version: u32,
    pub session_id: String,
    pub phase: Phase,
    pub now_ms: u64,
    #[serde(flatten)]
    pub screen: Screen,
}

fn demographics() -> Screen {
    Screen::Demographics {
        education: Choices {
            text: EDUCATION_QUESTION.into(),
            options: Education::ALL.iter().map(|e| e.label().into()).collect(),
        },
        degree_status: Choices {
            text: DEGREE_STATUS_QUESTION.into(),
            options: [DegreeStatus::CurrentlyPursuing, DegreeStatus::Completed].iter().map(|d| d.label().into()).collect(),
        },
        math_topics: Choices {
            text: MATH_QUESTION.into(),
            options: MathTopic::ALL.iter().map(|m| m.label().into()).collect(),
        },
    }
}

fn puzzle_view(s: &Session) -> PuzzleView {
    PuzzleView::of(s.puzzle.as_ref().expect("a puzzle is on screen"))
}

/// The screen for the session's current state as of `now_ms`.
pub fn screen(s: &Session, now_ms: u64) -> ScreenPayload {
    let screen = match &s.stage {
        Stage::DiagnosticPuzzle => Screen::DiagnosticPuzzle {
            givens: s.config.diagnostic.givens,
            wrong_attempts: s.diagnostic.wrong_attempts,
            reward_cents: super::diagnostic::diagnostic_reward(
                true,
                s.diagnostic.wrong_attempts,
                s.config.diagnostic_base_cents,
                s.config.diagnostic_penalty_cents,
            ),
        },
        Stage::DiagnosticSurvey => {
            let yn: Vec<String> = YesNoUnsure::ALL.iter().map(|o| o.label().into()).collect();
            let counts: Vec<String> = CompletedCount::ALL.iter().map(|o| o.label().into()).collect();
            Screen::DiagnosticSurvey {
                questions: vec![
                    Choices { text: SURVEY_QUESTIONS[0].into(), options: yn.clone() },
                    Choices { text: SURVEY_QUESTIONS[1].into(), options: yn },
                    Choices { text: SURVEY_QUESTIONS[2].into(), options: counts },
                ],
            }
        }
        Stage::Tutorial { step, hint } => {
            let script = s.tutorial.as_ref().expect("tutorial built on entry");
            let st = &script.steps[*step];
            Screen::Tutorial {
                step: step + 1,
                total: script.steps.len(),
                kind: st.kind,
                text: st.text.clone(),
                panels: st.panels.clone(),
                input: match st.expected {
                    Expected::Acknowledge => InputKind::Acknowledge,
                    Expected::ExactCells { .. } | Expected::AnyCell { .. } => InputKind::Cells,
                    Expected::Digit { .. } => InputKind::Digit,
                },
                hint: hint.clone(),
            }
        }
        Stage::Practice { trial, attempts, feedback, .. } => Screen::Practice {
            trial: trial + 1,
            total: PRACTICE_TRIALS,
            puzzle: puzzle_view(s),
            attempts: *attempts,
            feedback: feedback.clone(),
            bonus_cents: s.bonus_cents,
        },
        Stage::Test { trial, started_ms } => {
            let deadline_ms = started_ms + s.config.time_limit_ms;
            Screen::Test {
                trial: trial + 1,
                total: TEST_TRIALS,
                puzzle: puzzle_view(s),
                started_ms: *started_ms,
                deadline_ms,
                remaining_ms: deadline_ms.saturating_sub(now_ms),
            }
        }
        Stage::TestWait { trial, correct, ready_at_ms } => Screen::TestResult {
            trial: trial + 1,
            total: TEST_TRIALS,
            correct: *correct,
            ready_at_ms: *ready_at_ms,
            remaining_ms: ready_at_ms.saturating_sub(now_ms),
            can_skip: *correct,
        },
        Stage::AttentionCheck => Screen::AttentionCheck { questions: super::questionnaire::ATTENTION_QUESTIONS },
        Stage::QuestionnairePuzzle => Screen::QuestionnairePuzzle { puzzle: puzzle_view(s) },
        Stage::Question { number } => {
            let q = question(*number).expect("question in range");
            let record = s.questionnaire.as_ref().expect("questionnaire in progress");
            let selected_cells = match record.answers.get(&5) {
                Some(AnswerValue::Cells(c)) if *number == 6 => c.clone(),
                _ => Vec::new(),
            };
            Screen::Question {
                number: *number,
                kind: q.kind,
                text: q.text.into(),
                options: q.options.iter().map(|o| o.to_string()).collect(),
                puzzle: puzzle_view(s),
                response: record.response,
                selected_cells,
            }
        }
        Stage::Demographics | Stage::ScreenedOut { demographics_done: false } => demographics(),
        Stage::Done | Stage::ScreenedOut { demographics_done: true } => {
            let score = super::score_session(s);
            Screen::Done {
                completed_experiment: s.stage == Stage::Done,
                solved: score.first_attempt_solves,
                puzzles: PRACTICE_TRIALS + TEST_TRIALS,
                bonus_cents: score.bonus_cents + score.diagnostic_reward_cents,
            }
        }
    };
    ScreenPayload { format_version: FORMAT_VERSION, session_id: s.id.clone(), phase: s.phase(), now_ms, screen }
}
