//! Participant classification and test-phase condition summaries.

mod logistic;
mod summary;

pub use logistic::{fit_logistic, fit_logistic_with, indexed, penalized_loss, LogisticFit, RIDGE};
pub use summary::{condition_summary, Factor, SummaryRow, TestTrial, BOOTSTRAP_RESAMPLES};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::puzzle::ResponseRole;

pub const PRACTICE_TRIALS: usize = 25;
pub const TEST_TRIALS: usize = 64;
pub const SOLVER_THRESHOLD: f64 = 0.8;
pub const PD_ACCURACY_CEILING: f64 = 0.6;
pub const PD_MIN_PREVALENT: usize = 58;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("need at least {needed} trials, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("trial indices are 1-based")]
    BadTrialIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParticipantClassification {
    pub solver: bool,
    pub persistent_solver: bool,
    pub pd_guesser: bool,
}

fn require(got: usize, needed: usize) -> Result<(), AnalysisError> {
    if got < needed {
        Err(AnalysisError::InsufficientData { needed, got })
    } else {
        Ok(())
    }
}

/// Solver iff the practice-phase fit predicts more than 80% accuracy at trial 25.
pub fn classify_solver(practice_correct: &[bool]) -> Result<bool, AnalysisError> {
    require(practice_correct.len(), PRACTICE_TRIALS)?;
    let f = fit_logistic(&indexed(&practice_correct[..PRACTICE_TRIALS]))?;
    Ok(f.predict(PRACTICE_TRIALS) > SOLVER_THRESHOLD)
}

fn test_prediction(test_correct: &[bool]) -> Result<f64, AnalysisError> {
    require(test_correct.len(), TEST_TRIALS)?;
    Ok(fit_logistic(&indexed(&test_correct[..TEST_TRIALS]))?.predict(TEST_TRIALS))
}

pub fn classify_persistent_solver(test_correct: &[bool], solver: bool) -> Result<bool, AnalysisError> {
    let pred = test_prediction(test_correct)?;
    Ok(solver && pred >= SOLVER_THRESHOLD)
}

pub fn classify_pd_guesser(test_roles: &[ResponseRole], solver: bool) -> Result<bool, AnalysisError> {
    let correct: Vec<bool> = test_roles.iter().map(|&r| r == ResponseRole::Target).collect();
    let pred = test_prediction(&correct)?;
    let last8 = correct[TEST_TRIALS - 8..TEST_TRIALS].iter().filter(|&&c| c).count();
    let prevalent = test_roles[..TEST_TRIALS].iter().filter(|r| r.is_prevalent()).count();
    Ok(!solver && pred <= PD_ACCURACY_CEILING && (3..=5).contains(&last8) && prevalent >= PD_MIN_PREVALENT)
}

/// Full classification from practice and test response roles.
pub fn classify_participant(
    practice: &[ResponseRole],
    test: &[ResponseRole],
) -> Result<ParticipantClassification, AnalysisError> {
    let practice_correct: Vec<bool> = practice.iter().map(|&r| r == ResponseRole::Target).collect();
    let test_correct: Vec<bool> = test.iter().map(|&r| r == ResponseRole::Target).collect();
    let solver = classify_solver(&practice_correct)?;
    Ok(ParticipantClassification {
        solver,
        persistent_solver: classify_persistent_solver(&test_correct, solver)?,
        pd_guesser: classify_pd_guesser(test, solver)?,
    })
}
