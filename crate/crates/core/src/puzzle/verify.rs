//! Independent checks of the puzzle invariants.
//!
//! Candidate elimination here works on raw row-major indices and does not
//! reuse the grid's peer tables, so it can serve as an oracle for them.

use serde::Serialize;

use super::HiddenSinglePuzzle;
use crate::grid::{Coord, Digit};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyFailure {
    pub reason: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub failures: Vec<VerifyFailure>,
}

impl VerificationReport {
    pub fn has_reason(&self, reason: &str) -> bool {
        self.failures.iter().any(|f| f.reason == reason)
    }
}

fn cells_of(p: &HiddenSinglePuzzle) -> [u8; 81] {
    let mut out = [0u8; 81];
    for (c, d) in p.grid.filled() {
        out[(c.row() as usize - 1) * 9 + c.col() as usize - 1] = d.get();
    }
    out
}

/// Whether digit `d` appears in the row, column or box of 0-based (r, c).
fn blocked(cells: &[u8; 81], r: usize, c: usize, d: u8) -> bool {
    (0..9).any(|i| cells[r * 9 + i] == d || cells[i * 9 + c] == d)
        || (0..9).any(|i| cells[(r / 3 * 3 + i / 3) * 9 + c / 3 * 3 + i % 3] == d)
}

fn naive_candidates(cells: &[u8; 81], house: &[Coord], d: u8) -> Vec<Coord> {
    house
        .iter()
        .copied()
        .filter(|c| {
            let (r, k) = (c.row() as usize - 1, c.col() as usize - 1);
            cells[r * 9 + k] == 0 && !blocked(cells, r, k, d)
        })
        .collect()
}

fn duplicate_in_units(cells: &[u8; 81]) -> bool {
    for u in 0..9 {
        let mut seen = [[false; 10]; 3];
        for i in 0..9 {
            let idx = [u * 9 + i, i * 9 + u, (u / 3 * 3 + i / 3) * 9 + u % 3 * 3 + i % 3];
            for (k, &x) in idx.iter().enumerate() {
                let v = cells[x] as usize;
                if v != 0 && std::mem::replace(&mut seen[k][v], true) {
                    return true;
                }
            }
        }
    }
    false
}

pub fn verify_puzzle(p: &HiddenSinglePuzzle) -> VerificationReport {
    let mut failures = Vec::new();
    let mut fail = |reason: &'static str, detail: String| failures.push(VerifyFailure { reason, detail });
    let cells = cells_of(p);
    let count = |d: Digit| cells.iter().filter(|&&x| x == d.get()).count();
    let house = p.target_house.cells();

    let filled = cells.iter().filter(|&&x| x != 0).count();
    if filled != 9 {
        fail("hint count", format!("{filled} filled cells, expected 9"));
    }
    if duplicate_in_units(&cells) {
        fail("sudoku rules", "a digit repeats in a row, column or box".into());
    }
    if !house.contains(&p.goal) {
        fail("target house", format!("goal {} is outside {}", p.goal, p.target_house));
    }
    if p.target_house.kind() != p.features.house_type.house_kind()
        || p.goal != p.features.goal()
    {
        fail("features", "house or goal disagrees with the stored features".into());
    }
    if p.grid.get(p.goal).is_some() {
        fail("goal not empty", format!("{} holds a digit", p.goal));
    }
    if p.target == p.distractor {
        fail("digit set", "target equals distractor".into());
    }
    if !p.features.digit_set.contains(p.target) || !p.features.digit_set.contains(p.distractor) {
        fail("digit set", "target or distractor outside the digit set".into());
    }
    let n = count(p.target);
    if n != 3 {
        fail("target count", format!("target {} appears {n} times", p.target));
    }
    let n = count(p.distractor);
    if n != 3 {
        fail("distractor count", format!("distractor {} appears {n} times", p.distractor));
    }
    for (i, &d) in p.in_house.iter().enumerate() {
        if d == p.target || d == p.distractor || p.in_house[..i].contains(&d) {
            fail("in-house", format!("in-house digit {d} repeats or overlaps a prevalent digit"));
            continue;
        }
        let in_house_hits = house.iter().filter(|c| p.grid.get(**c) == Some(d)).count();
        if count(d) != 1 || in_house_hits != 1 {
            fail("in-house", format!("in-house digit {d} must appear once, inside the house"));
        }
    }
    let absent = (1..=9u8).filter(|&v| !cells.contains(&v)).count();
    if absent != 4 {
        fail("absent count", format!("{absent} absent digits, expected 4"));
    }
    for &c in &house {
        if let Some(d) = p.grid.get(c) {
            if !p.in_house.contains(&d) {
                fail("in-house", format!("{c} holds {d}, which is not an in-house digit"));
            }
        }
    }
    let t = naive_candidates(&cells, &house, p.target.get());
    if t != [p.goal] {
        fail("target candidates", format!("target candidates {t:?}, expected only the goal"));
    }
    let dc = naive_candidates(&cells, &house, p.distractor.get());
    if dc.len() < 2 {
        fail("distractor candidates", format!("distractor has {} candidate(s)", dc.len()));
    }
    VerificationReport { passed: failures.is_empty(), failures }
}

/// True when some empty target-house cell is ruled out for the distractor by
/// two or more distractor instances.
pub fn has_redundant_distractor(p: &HiddenSinglePuzzle) -> bool {
    let instances = p.instances(p.distractor);
    p.target_house
        .cells()
        .into_iter()
        .filter(|&c| p.grid.is_empty_at(c))
        .any(|c| instances.iter().filter(|&&i| i.sees(c)).count() >= 2)
}
