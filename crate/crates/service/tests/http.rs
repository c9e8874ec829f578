mod common;

use std::collections::{BTreeMap, BTreeSet};

use axum::http::{Method, StatusCode};
use serde_json::Value;

use common::{json, run_session, Api};
use hidden_single_core::agents::simulate_cohort;
use hidden_single_core::export::{read_export, synthetic_rows, write_export, EXPORT_COLUMNS};
use hidden_single_core::model::solver_params;
use hidden_single_core::protocol::screen::Screen;
use hidden_single_core::protocol::{Input, Phase, PRACTICE_TRIALS, TEST_TRIALS};

/// Walks a fresh session up to its first practice trial.
async fn to_practice(api: &Api) -> String {
    let id = api.create(None).await.screen().session_id;
    loop {
        let s = api.get_screen(&id).await.screen();
        if matches!(s.screen, Screen::Practice { .. }) {
            return id;
        }
        let (input, wait) = common::respond(&s, || common::tutorial_answer(&api.store, &id), false).unwrap();
        api.clock.advance(wait);
        api.post(&id, input).await.screen();
    }
}

async fn to_test(api: &Api) -> String {
    let id = to_practice(api).await;
    loop {
        let s = api.get_screen(&id).await.screen();
        if matches!(s.screen, Screen::Test { .. }) {
            return id;
        }
        let (input, wait) = common::respond(&s, || unreachable!(), false).unwrap();
        api.clock.advance(wait);
        api.post(&id, input).await.screen();
    }
}

#[tokio::test]
async fn create_returns_the_diagnostic_screen() {
    let api = Api::new();
    let r = api.create(None).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let p = r.screen();
    assert_eq!(p.format_version, 1);
    assert_eq!(p.phase, Phase::Diagnostic);
    assert!(matches!(p.screen, Screen::DiagnosticPuzzle { .. }));
    let again = api.create(None).await.screen();
    assert_ne!(again.session_id, p.session_id);
}

#[tokio::test]
async fn same_seed_same_assignment() {
    let api = Api::new();
    let a = api.create(Some(77)).await.screen().session_id;
    let b = api.create(Some(77)).await.screen().session_id;
    assert_eq!(api.store.session(&a).unwrap().assignment, api.store.session(&b).unwrap().assignment);
    assert_eq!(api.store.session(&a).unwrap().schedule, api.store.session(&b).unwrap().schedule);
}

#[tokio::test]
async fn unknown_session_is_404() {
    let api = Api::new();
    let r = api.get_screen("missing").await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert_eq!(r.error().error, "unknown_session");
    let r = api.post("missing", Input::Continue).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn illegal_event_is_409_with_reason() {
    let api = Api::new();
    let id = api.create(None).await.screen().session_id;
    let r = api.post(&id, Input::Timeout).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    let e = r.error();
    assert_eq!(e.error, "illegal_event");
    assert!(e.message.contains("timeout"));
}

#[tokio::test]
async fn malformed_bodies_are_400() {
    let api = Api::new();
    let id = api.create(None).await.screen().session_id;
    let r = api.call(Method::POST, &format!("/sessions/{id}/events"), Some("{\"kind\":\"dance\"}".into())).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.error().error, "bad_request");
    let r = api.call(Method::POST, "/sessions", Some("[1,2]".into())).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn correct_practice_answer_moves_on() {
    let api = Api::new();
    let id = to_practice(&api).await;
    let Screen::Practice { trial: 1, puzzle, .. } = api.get_screen(&id).await.screen().screen else { panic!() };
    api.clock.advance(3_000);
    let next = api.post(&id, Input::Answer { digit: Some(common::solve(&puzzle)) }).await.screen();
    assert!(matches!(next.screen, Screen::Practice { trial: 2, attempts: 0, feedback: None, .. }));
}

#[tokio::test]
async fn test_trials_take_a_single_attempt() {
    let api = Api::new();
    let id = to_test(&api).await;
    let Screen::Test { puzzle, .. } = api.get_screen(&id).await.screen().screen else { panic!() };
    api.clock.advance(4_000);
    let wrong = hidden_single_core::grid::Digit::new(common::solve(&puzzle).get() % 9 + 1).unwrap();
    let r = api.post(&id, Input::Answer { digit: Some(wrong) }).await.screen();
    assert!(matches!(r.screen, Screen::TestResult { correct: false, can_skip: false, .. }));
    let r = api.post(&id, Input::Answer { digit: Some(common::solve(&puzzle)) }).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.error().error, "duplicate_attempt");
    // the wait after a wrong answer cannot be skipped
    let r = api.post(&id, Input::Continue).await;
    assert_eq!(r.error().error, "wait_running");
    api.clock.advance(10_000);
    assert!(matches!(api.post(&id, Input::Continue).await.screen().screen, Screen::Test { trial: 2, .. }));
}

#[tokio::test]
async fn timeout_is_checked_against_the_server_clock() {
    let api = Api::new();
    let id = to_test(&api).await;
    api.clock.advance(119_999);
    let r = api.post(&id, Input::Timeout).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.error().error, "timer_running");
    api.clock.advance(1);
    let p = api.post(&id, Input::Timeout).await.screen();
    assert!(matches!(p.screen, Screen::TestResult { correct: false, .. }));
    let ev = api.store.session(&id).unwrap().events.last().cloned().unwrap();
    assert!(ev.timed_out);
    assert_eq!(ev.rt_ms, 120_000);
}

#[tokio::test]
async fn late_answer_is_rejected() {
    let api = Api::new();
    let id = to_test(&api).await;
    let Screen::Test { puzzle, .. } = api.get_screen(&id).await.screen().screen else { panic!() };
    api.clock.advance(120_001);
    let r = api.post(&id, Input::Answer { digit: Some(common::solve(&puzzle)) }).await;
    assert_eq!(r.error().error, "expired_timer");
}

#[tokio::test]
async fn scripted_client_completes_a_session() {
    let api = Api::new();
    let id = api.create(None).await.screen().session_id;
    let screens = run_session(&api, &id, true).await;
    let Screen::Done { completed_experiment, solved, puzzles, bonus_cents } = screens.last().unwrap().screen else {
        panic!()
    };
    assert!(completed_experiment);
    assert_eq!(puzzles, PRACTICE_TRIALS + TEST_TRIALS);
    // practice misses once per trial; a fifth of the test trials time out
    let timeouts = (1..=TEST_TRIALS).filter(|t| t % 5 == 0).count() as u32;
    assert_eq!(solved, (TEST_TRIALS as u32) - timeouts);
    assert_eq!(bonus_cents, solved * 5);

    // events after the end are refused
    let r = api.post(&id, Input::Continue).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.error().error, "session_finished");

    let csv = api.call(Method::GET, "/export.csv", None).await;
    assert_eq!(csv.status, StatusCode::OK);
    let rows = read_export(csv.text().as_bytes()).unwrap();
    let count = |p| rows.iter().filter(|r| r.phase == p).count();
    assert_eq!((count(Phase::Practice), count(Phase::Test), count(Phase::Questionnaire)), (25, 64, 1));
    assert!(rows.iter().filter(|r| r.phase == Phase::Practice).all(|r| r.attempts == 2 && !r.correct));

    let only_test = api.call(Method::GET, "/export.csv?phase=test&finished_only=true", None).await;
    assert_eq!(read_export(only_test.text().as_bytes()).unwrap().len(), 64);
    let bad = api.call(Method::GET, "/export.csv?phase=lunch", None).await;
    assert_eq!(bad.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn empty_export_is_header_only() {
    let api = Api::new();
    let r = api.call(Method::GET, "/export.csv", None).await;
    assert_eq!(r.text(), EXPORT_COLUMNS.join(",") + "\n");
}

#[tokio::test]
async fn real_and_synthetic_exports_share_a_schema() {
    let api = Api::new();
    let id = api.create(None).await.screen().session_id;
    run_session(&api, &id, false).await;
    let real = api.call(Method::GET, "/export.csv", None).await.text();
    let cohort = simulate_cohort(2, &solver_params(), 89, 5).unwrap();
    let mut syn = Vec::new();
    write_export(&synthetic_rows(&cohort, 25, 5), &mut syn).unwrap();
    let syn = String::from_utf8(syn).unwrap();
    assert_eq!(real.lines().next(), syn.lines().next());
}

#[tokio::test]
async fn healthz_reports_sessions() {
    let api = Api::new();
    api.create(None).await;
    let r = api.call(Method::GET, "/healthz", None).await;
    let v: Value = serde_json::from_slice(&r.body).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["sessions"], 1);
    assert_eq!(v["format_version"], 1);
}

fn key_paths(v: &Value, prefix: &str, out: &mut BTreeSet<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = format!("{prefix}.{k}");
                out.insert(p.clone());
                key_paths(x, &p, out);
            }
        }
        Value::Array(a) => {
            for x in a {
                key_paths(x, &format!("{prefix}[]"), out);
            }
        }
        _ => {}
    }
}

fn top_keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

/// Every screen kind seen in a full run has the same top-level fields as the
/// documented example and no nested field the example lacks.
#[tokio::test]
async fn payloads_match_the_schema_file() {
    let api = Api::new();
    let id = api.create(None).await.screen().session_id;
    let mut examples: BTreeMap<String, Value> = BTreeMap::new();
    for p in run_session(&api, &id, true).await {
        let v: Value = serde_json::from_str(&json(&p)).unwrap();
        let kind = v["screen"].as_str().unwrap().to_string();
        // prefer the richest example of each kind
        let size = |v: &Value| {
            let mut s = BTreeSet::new();
            key_paths(v, "", &mut s);
            s.len()
        };
        if examples.get(&kind).is_none_or(|old| size(&v) > size(old)) {
            examples.insert(kind, v);
        }
    }
    let error = serde_json::from_slice::<Value>(&api.post(&id, Input::Continue).await.body).unwrap();

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/schema/payloads.json");
    if std::env::var_os("UPDATE_SCHEMA").is_some() {
        let doc = serde_json::json!({ "format_version": 1, "screens": examples, "error": error });
        std::fs::write(path, serde_json::to_string_pretty(&doc).unwrap() + "\n").unwrap();
    }
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(doc["format_version"], 1);
    assert_eq!(top_keys(&doc["error"]), top_keys(&error));
    let documented = doc["screens"].as_object().unwrap();
    let seen: BTreeSet<&String> = examples.keys().collect();
    assert_eq!(documented.keys().collect::<BTreeSet<_>>(), seen);
    for (kind, live) in &examples {
        let ex = &documented[kind];
        assert_eq!(top_keys(ex), top_keys(live), "{kind}");
        let (mut a, mut b) = (BTreeSet::new(), BTreeSet::new());
        key_paths(ex, "", &mut a);
        key_paths(live, "", &mut b);
        let extra: Vec<_> = b.difference(&a).collect();
        assert!(extra.is_empty(), "{kind}: undocumented fields {extra:?}");
    }
}
