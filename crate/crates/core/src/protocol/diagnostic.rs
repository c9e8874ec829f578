//! The 4×4 screening puzzle and the Sudoku-experience survey that gate entry
//! into the experiment.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Row-major 4×4 grid, `0` for an empty cell.
pub type MiniGrid = [[u8; 4]; 4];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagnosticError {
    #[error("given at ({0}, {1}) is outside 0..=4")]
    BadGiven(usize, usize),
    #[error("puzzle has {0} solutions, expected exactly one")]
    NotUnique(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticPuzzle {
    pub givens: MiniGrid,
}

impl Default for DiagnosticPuzzle {
    fn default() -> Self {
        DiagnosticPuzzle { givens: [[0, 0, 3, 0], [0, 4, 0, 2], [2, 1, 0, 0], [0, 0, 2, 0]] }
    }
}

fn fits(g: &MiniGrid, r: usize, c: usize, v: u8) -> bool {
    let (br, bc) = (r / 2 * 2, c / 2 * 2);
    (0..4).all(|i| g[r][i] != v && g[i][c] != v && g[br + i / 2][bc + i % 2] != v)
}

fn search(g: &mut MiniGrid, k: usize, limit: usize, found: &mut Vec<MiniGrid>) {
    if found.len() >= limit {
        return;
    }
    if k == 16 {
        found.push(*g);
        return;
    }
    let (r, c) = (k / 4, k % 4);
    if g[r][c] != 0 {
        return search(g, k + 1, limit, found);
    }
    for v in 1..=4 {
        if fits(g, r, c, v) {
            g[r][c] = v;
            search(g, k + 1, limit, found);
            g[r][c] = 0;
        }
    }
}

/// Complete and consistent with the 4×4 rules.
pub fn is_valid_solution(g: &MiniGrid) -> bool {
    let mut scratch = *g;
    for r in 0..4 {
        for c in 0..4 {
            let v = g[r][c];
            if !(1..=4).contains(&v) {
                return false;
            }
            scratch[r][c] = 0;
            let ok = fits(&scratch, r, c, v);
            scratch[r][c] = v;
            if !ok {
                return false;
            }
        }
    }
    true
}

impl DiagnosticPuzzle {
    /// Up to `limit` solutions.
    pub fn solutions(&self, limit: usize) -> Vec<MiniGrid> {
        let mut g = self.givens;
        let mut found = Vec::new();
        search(&mut g, 0, limit, &mut found);
        found
    }

    /// The unique solution, or why there is none.
    pub fn validate(&self) -> Result<MiniGrid, DiagnosticError> {
        for (r, row) in self.givens.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v > 4 {
                    return Err(DiagnosticError::BadGiven(r, c));
                }
            }
        }
        match self.solutions(2).as_slice() {
            [only] => Ok(*only),
            other => Err(DiagnosticError::NotUnique(other.len())),
        }
    }

    /// Every cell correct: a valid complete grid that keeps all givens.
    pub fn is_solved_by(&self, response: &MiniGrid) -> bool {
        let keeps_givens =
            (0..16).all(|k| self.givens[k / 4][k % 4] == 0 || self.givens[k / 4][k % 4] == response[k / 4][k % 4]);
        keeps_givens && is_valid_solution(response)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YesNoUnsure {
    Yes,
    No,
    NotSure,
}

impl YesNoUnsure {
    pub const ALL: [YesNoUnsure; 3] = [YesNoUnsure::Yes, YesNoUnsure::No, YesNoUnsure::NotSure];

    pub fn label(self) -> &'static str {
        match self {
            YesNoUnsure::Yes => "Yes",
            YesNoUnsure::No => "No",
            YesNoUnsure::NotSure => "Not sure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletedCount {
    None,
    OneToThree,
    FourToSix,
    SevenToNine,
    TenOrMore,
}

impl CompletedCount {
    pub const ALL: [CompletedCount; 5] = [
        CompletedCount::None,
        CompletedCount::OneToThree,
        CompletedCount::FourToSix,
        CompletedCount::SevenToNine,
        CompletedCount::TenOrMore,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CompletedCount::None => "None",
            CompletedCount::OneToThree => "1 to 3",
            CompletedCount::FourToSix => "4 to 6",
            CompletedCount::SevenToNine => "7 to 9",
            CompletedCount::TenOrMore => "10 or more",
        }
    }
}

pub const SURVEY_QUESTIONS: [&str; 3] = [
    "Have you heard of Sudoku before?",
    "Have you ever attempted to solve a Sudoku puzzle?",
    "About how many Sudoku puzzles have you successfully completed?",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticSurvey {
    pub heard_of_sudoku: YesNoUnsure,
    pub attempted_sudoku: YesNoUnsure,
    pub completed: CompletedCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eligibility {
    Eligible,
    ScreenedOut,
}

/// Only people who neither solved the 4×4 puzzle nor report completing any
/// Sudoku go on to the experiment.
pub fn evaluate_diagnostic(
    puzzle: &DiagnosticPuzzle,
    response: Option<&MiniGrid>,
    survey: &DiagnosticSurvey,
) -> Eligibility {
    let solved = response.is_some_and(|g| puzzle.is_solved_by(g));
    if !solved && survey.completed == CompletedCount::None {
        Eligibility::Eligible
    } else {
        Eligibility::ScreenedOut
    }
}

/// Reward in cents for solving the 4×4 puzzle after `wrong_attempts` misses.
pub fn diagnostic_reward(solved: bool, wrong_attempts: u32, base_cents: u32, penalty_cents: u32) -> u32 {
    if solved {
        base_cents.saturating_sub(penalty_cents.saturating_mul(wrong_attempts))
    } else {
        0
    }
}
