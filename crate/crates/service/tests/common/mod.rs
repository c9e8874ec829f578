//! In-process HTTP client and a scripted participant that decides what to
//! send from the screens it receives.

#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde::Serialize;
use tower::ServiceExt;

use hidden_single_core::grid::{Digit, Grid};
use hidden_single_core::protocol::diagnostic::{CompletedCount, DiagnosticSurvey, YesNoUnsure};
use hidden_single_core::protocol::questionnaire::{
    AnswerValue, Choice, DegreeStatus, Demographics, Education, QuestionKind,
};
use hidden_single_core::protocol::screen::{PuzzleView, Screen, ScreenPayload};
use hidden_single_core::protocol::tutorial::{Expected, TutorialAnswer};
use hidden_single_core::protocol::Input;
use hidden_single_service::{router, ErrorBody, EventRequest, ManualClock, SessionStore, StoreConfig};

pub struct Api {
    pub router: Router,
    pub store: Arc<SessionStore>,
    pub clock: ManualClock,
    pub dir: tempfile::TempDir,
}

pub struct Reply {
    pub status: StatusCode,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn screen(&self) -> ScreenPayload {
        assert!(self.status.is_success(), "{} {}", self.status, String::from_utf8_lossy(&self.body));
        serde_json::from_slice(&self.body).expect("screen payload")
    }

    pub fn error(&self) -> ErrorBody {
        serde_json::from_slice(&self.body).expect("error body")
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }
}

pub fn config(dir: &std::path::Path) -> StoreConfig {
    let mut c = StoreConfig::new(dir);
    c.base_seed = Some(2024);
    c.allow_client_seed = true;
    c.fsync = false;
    c
}

impl Api {
    pub fn new() -> Api {
        let dir = tempfile::tempdir().unwrap();
        let clock = ManualClock::new(1_700_000_000_000);
        let store = Arc::new(SessionStore::open(config(dir.path()), Arc::new(clock.clone())).unwrap());
        Api { router: router(store.clone()), store, clock, dir }
    }

    pub async fn call(&self, method: Method, uri: &str, body: Option<String>) -> Reply {
        let mut req = Request::builder().method(method).uri(uri);
        if body.is_some() {
            req = req.header("content-type", "application/json");
        }
        let req = req.body(body.map(Body::from).unwrap_or_else(Body::empty)).unwrap();
        let res = self.router.clone().oneshot(req).await.unwrap();
        let status = res.status();
        let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
        Reply { status, body }
    }

    pub async fn create(&self, seed: Option<u64>) -> Reply {
        let body = seed.map(|s| format!("{{\"seed\":{s}}}"));
        self.call(Method::POST, "/sessions", body).await
    }

    pub async fn get_screen(&self, id: &str) -> Reply {
        self.call(Method::GET, &format!("/sessions/{id}/screen"), None).await
    }

    pub async fn post(&self, id: &str, input: Input) -> Reply {
        let body = json(&EventRequest { input, client_ms: Some(1) });
        self.call(Method::POST, &format!("/sessions/{id}/events"), Some(body)).await
    }
}

pub fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap()
}

pub fn demographics() -> Demographics {
    Demographics {
        age: Some(29),
        gender: None,
        education: Education::Master,
        degree_status: DegreeStatus::CurrentlyPursuing,
        math_topics: vec![],
    }
}

/// The digit that is a hidden single at the goal, found from the view alone.
pub fn solve(view: &PuzzleView) -> Digit {
    let grid = Grid::from_compact(&view.grid).unwrap();
    Digit::all().find(|&d| grid.candidate_cells(view.house, d) == [view.goal]).expect("a hidden single")
}

/// What a cooperative participant sends on `screen`, or `None` when the
/// session is over. `tutorial_answer` stands in for reading the step text.
/// Returns the input and how long the participant takes.
pub fn respond(
    payload: &ScreenPayload,
    tutorial_answer: impl Fn() -> TutorialAnswer,
    practice_miss: bool,
) -> Option<(Input, u64)> {
    let next = match &payload.screen {
        Screen::DiagnosticPuzzle { .. } => (Input::DiagnosticGiveUp, 30_000),
        Screen::DiagnosticSurvey { .. } => (
            Input::DiagnosticSurvey {
                survey: DiagnosticSurvey {
                    heard_of_sudoku: YesNoUnsure::Yes,
                    attempted_sudoku: YesNoUnsure::No,
                    completed: CompletedCount::None,
                },
            },
            8_000,
        ),
        Screen::Tutorial { .. } => (Input::Tutorial { answer: tutorial_answer() }, 4_000),
        Screen::Practice { puzzle, attempts, .. } => {
            let right = solve(puzzle);
            let d = if practice_miss && *attempts == 0 { Digit::new(right.get() % 9 + 1).unwrap() } else { right };
            (Input::Answer { digit: Some(d) }, 5_000)
        }
        Screen::Test { puzzle, trial, .. } => {
            // every fifth trial runs out of time
            if trial % 5 == 0 {
                (Input::Timeout, 120_000)
            } else {
                (Input::Answer { digit: Some(solve(puzzle)) }, 7_000)
            }
        }
        Screen::TestResult { remaining_ms, can_skip, .. } => {
            (Input::Continue, if *can_skip { 500 } else { *remaining_ms })
        }
        Screen::AttentionCheck { questions } => {
            (Input::AttentionCheck { answers: (0..*questions).map(|i| format!("answer {i}")).collect() }, 20_000)
        }
        Screen::QuestionnairePuzzle { puzzle } => (Input::Answer { digit: Some(solve(puzzle)) }, 15_000),
        Screen::Question { number, kind, puzzle, .. } => {
            let answer = match kind {
                QuestionKind::Confidence => AnswerValue::Confidence(85),
                QuestionKind::FreeText => AnswerValue::Text(format!("because of question {number}")),
                QuestionKind::Choice => AnswerValue::Choice(Choice::A),
                QuestionKind::Cells => AnswerValue::Cells(vec![puzzle.goal]),
            };
            (Input::Question { number: *number, answer }, 10_000)
        }
        Screen::Demographics { .. } => (Input::Demographics { demographics: demographics() }, 12_000),
        Screen::Done { .. } => return None,
    };
    Some(next)
}

/// The expected answer of the current tutorial step, read from the server.
pub fn tutorial_answer(store: &SessionStore, id: &str) -> TutorialAnswer {
    let s = store.session(id).unwrap();
    let hidden_single_core::protocol::Stage::Tutorial { step, .. } = s.stage else { panic!("not in the tutorial") };
    match &s.tutorial.unwrap().steps[step].expected {
        Expected::Acknowledge => TutorialAnswer::Acknowledge,
        Expected::ExactCells { cells } => TutorialAnswer::Cells { cells: cells.clone() },
        Expected::AnyCell { cells } => TutorialAnswer::Cells { cells: vec![cells[0]] },
        Expected::Digit { digit } => TutorialAnswer::Digit { digit: *digit },
    }
}

/// Drives one session to the end over HTTP. Returns every screen seen.
pub async fn run_session(api: &Api, id: &str, practice_miss: bool) -> Vec<ScreenPayload> {
    let mut screens = vec![api.get_screen(id).await.screen()];
    while let Some((input, wait)) = respond(screens.last().unwrap(), || tutorial_answer(&api.store, id), practice_miss) {
        api.clock.advance(wait);
        screens.push(api.post(id, input).await.screen());
        assert!(screens.len() < 1_000, "session does not finish");
    }
    screens
}
