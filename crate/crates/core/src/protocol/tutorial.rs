//! The tutorial: a fixed sequence of steps built around one puzzle with the
//! participant's training features.
//!
//! Every participant sees the same step kinds in the same order; only the
//! puzzle, and therefore the grids and expected answers, differ.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::feedback::{Color, Highlight};
use crate::grid::{Coord, Digit, Grid};
use crate::puzzle::{generate_puzzle, HiddenSinglePuzzle, ParticipantAssignment, PuzzleError};
use crate::rng::{child_rng, derive_seed};

pub const SUDOKU_SENTENCE: &str = "Sudoku is a puzzle with a 9x9 grid of numbers where each row, column, and 3x3 box \
                                   must contain exactly one of each number from 1 to 9.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Introduction,
    Contradiction,
    FullHouse,
    TargetIntroduction,
    TargetClue,
    DistractorIntroduction,
    DistractorClue,
    Summary,
}

/// Step kinds in order. Target and distractor clue steps come in threes: one
/// for the box, one for each remaining line cell or distractor instance.
pub const STEP_KINDS: [StepKind; 12] = [
    StepKind::Introduction,
    StepKind::Contradiction,
    StepKind::FullHouse,
    StepKind::TargetIntroduction,
    StepKind::TargetClue,
    StepKind::TargetClue,
    StepKind::TargetClue,
    StepKind::DistractorIntroduction,
    StepKind::DistractorClue,
    StepKind::DistractorClue,
    StepKind::DistractorClue,
    StepKind::Summary,
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Expected {
    Acknowledge,
    /// The selection must equal this set exactly (order ignored).
    ExactCells { cells: Vec<Coord> },
    /// A single selected cell from this set.
    AnyCell { cells: Vec<Coord> },
    Digit { digit: Digit },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TutorialAnswer {
    Acknowledge,
    Cells { cells: Vec<Coord> },
    Digit { digit: Digit },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Panel {
    #[serde(with = "crate::puzzle::grid_compact")]
    pub grid: Grid,
    pub highlights: Vec<Highlight>,
    pub caption: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TutorialStep {
    pub kind: StepKind,
    pub text: String,
    pub panels: Vec<Panel>,
    pub expected: Expected,
    /// Shown after a wrong answer; `None` for steps that only need acknowledging.
    pub hint: Option<String>,
}

impl TutorialStep {
    pub fn accepts(&self, answer: &TutorialAnswer) -> bool {
        match (&self.expected, answer) {
            (Expected::Acknowledge, TutorialAnswer::Acknowledge) => true,
            (Expected::ExactCells { cells: want }, TutorialAnswer::Cells { cells: got }) => {
                let mut a = want.clone();
                let mut b = got.clone();
                a.sort();
                b.sort();
                b.dedup();
                a == b
            }
            (Expected::AnyCell { cells: want }, TutorialAnswer::Cells { cells: got }) => {
                got.len() == 1 && want.contains(&got[0])
            }
            (Expected::Digit { digit: want }, TutorialAnswer::Digit { digit: got }) => want == got,
            _ => false,
        }
    }

    /// Hint for a rejected answer. The full-house exercise names the digit
    /// the participant entered.
    pub fn hint_for(&self, answer: &TutorialAnswer, noun: &str) -> Option<String> {
        match (self.kind, answer) {
            (StepKind::FullHouse, TutorialAnswer::Digit { digit }) => match self.expected {
                Expected::Digit { digit: want } if want != *digit => {
                    Some(format!("{digit} already exists in the {noun}."))
                }
                _ => self.hint.clone(),
            },
            _ => self.hint.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TutorialScript {
    pub puzzle: HiddenSinglePuzzle,
    pub steps: Vec<TutorialStep>,
}

fn panel(grid: Grid, marks: &[(Coord, Color)], caption: Option<String>) -> Panel {
    let mut highlights: Vec<Highlight> = Vec::new();
    for &(coord, color) in marks {
        match highlights.iter_mut().find(|h| h.coord == coord) {
            Some(h) => h.color = color,
            None => highlights.push(Highlight { coord, color }),
        }
    }
    highlights.sort_by_key(|h| (h.coord.row(), h.coord.col()));
    Panel { grid, highlights, caption }
}

fn ack(kind: StepKind, text: String, panels: Vec<Panel>) -> TutorialStep {
    TutorialStep { kind, text, panels, expected: Expected::Acknowledge, hint: None }
}

/// The target house filled in completely except the goal, with the other
/// digits from the house placed in random order. Only the house is shown.
fn filled_house(p: &HiddenSinglePuzzle, seed: u64) -> Grid {
    let mut rng = child_rng(seed, "tutorial-house", 0);
    let mut rest: Vec<Digit> =
        Digit::all().filter(|d| *d != p.target && !p.in_house.contains(d)).collect();
    rest.shuffle(&mut rng);
    let mut g = Grid::empty();
    let mut rest = rest.into_iter();
    for c in p.target_house.cells() {
        if c == p.goal {
            continue;
        }
        let d = p.grid.get(c).unwrap_or_else(|| rest.next().expect("five digits for five cells"));
        g.place(c, d);
    }
    g
}

fn clue_marks(p: &HiddenSinglePuzzle) -> Vec<(Coord, Color)> {
    let mut marks = vec![(p.goal, Color::Green)];
    marks.extend(p.blue_cells().into_iter().map(|c| (c, Color::Blue)));
    marks
}

/// The tutorial puzzle with the distractor removed.
fn without_distractor(p: &HiddenSinglePuzzle) -> Grid {
    let mut g = p.grid.clone();
    for c in p.instances(p.distractor) {
        g.set(c, None);
    }
    g
}

/// Groups of blue cells that share one constraining target instance: the
/// three box cells, then each line cell.
pub fn target_groups(p: &HiddenSinglePuzzle) -> Vec<Vec<Coord>> {
    let blue = p.blue_cells();
    let boxed: Vec<Coord> = blue.iter().copied().filter(|c| c.box_index() == p.layout.constraint_box).collect();
    let mut groups = vec![boxed];
    for &c in &p.layout.line_cells {
        if blue.contains(&c) {
            groups.push(vec![c]);
        }
    }
    groups
}

/// Target instances that exclude every cell in `cells`.
fn common_blockers(p: &HiddenSinglePuzzle, cells: &[Coord]) -> Vec<Coord> {
    let grid = without_distractor(p);
    let mut common = grid.blockers(cells[0], p.target);
    for &c in &cells[1..] {
        let b = grid.blockers(c, p.target);
        common.retain(|x| b.contains(x));
    }
    common
}

pub fn build_tutorial(assignment: &ParticipantAssignment, seed: u64) -> Result<TutorialScript, PuzzleError> {
    let p = generate_puzzle(&assignment.training, derive_seed(seed, "tutorial", 0))?;
    Ok(script_for(p, seed))
}

pub fn script_for(p: HiddenSinglePuzzle, seed: u64) -> TutorialScript {
    let noun = p.house_type().noun();
    let (t, d) = (p.target, p.distractor);
    let mut steps = Vec::with_capacity(STEP_KINDS.len());

    steps.push(ack(StepKind::Introduction, SUDOKU_SENTENCE.to_string(), Vec::new()));

    let house = filled_house(&p, seed);
    let mut broken = house.clone();
    let others: Vec<Digit> = p.target_house.cells().iter().filter_map(|&c| house.get(c)).collect();
    let dup = *others.choose(&mut child_rng(seed, "tutorial-duplicate", 0)).expect("eight digits");
    broken.place(p.goal, dup);
    let pair = broken
        .find_contradiction(p.target_house)
        .ok()
        .flatten()
        .expect("a duplicated digit in a full house is a contradiction");
    steps.push(TutorialStep {
        kind: StepKind::Contradiction,
        text: format!(
            "Each {noun} must contain each number from 1 to 9 exactly once. This {noun} breaks that rule. \
             Select the two cells that break it."
        ),
        panels: vec![panel(broken, &[(p.goal, Color::Green)], None)],
        expected: Expected::ExactCells { cells: vec![pair.0, pair.1] },
        hint: Some(format!("Look for a number that appears twice in the {noun} and select both cells that contain it.")),
    });

    let missing = house.full_house_missing(p.target_house).expect("exactly one empty cell");
    steps.push(TutorialStep {
        kind: StepKind::FullHouse,
        text: format!("Only one cell in this {noun} is empty. Enter the number that must go in the green cell."),
        panels: vec![panel(house, &[(p.goal, Color::Green)], None)],
        expected: Expected::Digit { digit: missing },
        hint: Some(format!("Find the number from 1 to 9 that does not yet appear in the {noun}.")),
    });

    let plain = without_distractor(&p);
    steps.push(ack(
        StepKind::TargetIntroduction,
        format!(
            "In this puzzle the green cell must contain a {t}, because a {t} cannot go in any of the blue cells. \
             The next steps show why each blue cell cannot contain a {t}."
        ),
        vec![panel(plain.clone(), &clue_marks(&p), None)],
    ));
    for group in target_groups(&p) {
        let mut marks = clue_marks(&p);
        marks.extend(group.iter().map(|&c| (c, Color::Purple)));
        let which = if group.len() == 1 { "cell" } else { "cells" };
        steps.push(TutorialStep {
            kind: StepKind::TargetClue,
            text: format!("Select the {t} that prevents a {t} from going in the purple {which}."),
            panels: vec![panel(plain.clone(), &marks, None)],
            expected: Expected::AnyCell { cells: common_blockers(&p, &group) },
            hint: Some(format!(
                "The cell you selected does not prevent a {t} from going in the purple {which}. \
                 Look for a {t} in the same row, column, or box."
            )),
        });
    }

    steps.push(ack(
        StepKind::DistractorIntroduction,
        format!(
            "Here is the same puzzle with more numbers added. The number {d} also appears three times, \
             but the {d}s do not rule out every blue cell."
        ),
        vec![panel(p.grid.clone(), &clue_marks(&p), None)],
    ));
    for clue in p.instances(d) {
        let constrained: Vec<Coord> = p.blue_cells().into_iter().filter(|&c| c.sees(clue)).collect();
        let mut marks = clue_marks(&p);
        marks.push((clue, Color::Orange));
        steps.push(TutorialStep {
            kind: StepKind::DistractorClue,
            text: format!(
                "Select every blue cell that cannot contain a {d} because of the orange {d}, then submit. \
                 If there are none, submit without selecting any cell."
            ),
            panels: vec![panel(p.grid.clone(), &marks, None)],
            expected: Expected::ExactCells { cells: constrained },
            hint: Some(format!(
                "Select exactly the blue cells that share a row, column, or box with the orange {d}."
            )),
        });
    }

    let mut target_marks = clue_marks(&p);
    target_marks.extend(p.instances(t).into_iter().map(|c| (c, Color::Purple)));
    let mut distractor_marks = clue_marks(&p);
    distractor_marks.extend(p.instances(d).into_iter().map(|c| (c, Color::Orange)));
    steps.push(ack(
        StepKind::Summary,
        format!(
            "On the left, every blue cell is ruled out for {t}, so {t} must go in the green cell. \
             On the right, a {d} could still go in a blue cell, so it is not certain that {d} must go in the green cell."
        ),
        vec![
            panel(p.grid.clone(), &target_marks, Some(format!("{t}"))),
            panel(p.grid.clone(), &distractor_marks, Some(format!("{d}"))),
        ],
    ));

    TutorialScript { puzzle: p, steps }
}
