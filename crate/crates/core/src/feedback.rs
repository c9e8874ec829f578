//! Practice-phase feedback: highlighted cells and an explanation that depend
//! on the role of the submitted digit.

use serde::{Deserialize, Serialize};

use crate::grid::{Coord, Digit};
use crate::puzzle::{classify_response, HiddenSinglePuzzle, LineKind, ResponseRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Red,
    Blue,
    Green,
    Purple,
    Orange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Highlight {
    #[serde(flatten)]
    pub coord: Coord,
    pub color: Color,
}

/// `Verbatim` reproduces the wording used in the original experiment,
/// including its typos; `Corrected` fixes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    #[default]
    Corrected,
    Verbatim,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feedback {
    pub highlights: Vec<Highlight>,
    pub message: String,
}

impl Feedback {
    pub fn color_at(&self, c: Coord) -> Option<Color> {
        self.highlights.iter().find(|h| h.coord == c).map(|h| h.color)
    }

    pub fn cells_with(&self, color: Color) -> Vec<Coord> {
        self.highlights.iter().filter(|h| h.color == color).map(|h| h.coord).collect()
    }
}

struct Canvas(Vec<(Coord, Color)>);

impl Canvas {
    fn paint(&mut self, c: Coord, color: Color) {
        match self.0.iter_mut().find(|(x, _)| *x == c) {
            Some(slot) => slot.1 = color,
            None => self.0.push((c, color)),
        }
    }

    fn finish(mut self) -> Vec<Highlight> {
        self.0.sort_by_key(|(c, _)| (c.row(), c.col()));
        self.0.into_iter().map(|(coord, color)| Highlight { coord, color }).collect()
    }
}

fn article(d: Digit, mode: FeedbackMode) -> &'static str {
    if mode == FeedbackMode::Corrected && d.get() == 8 {
        "an"
    } else {
        "a"
    }
}

/// Green goal, blue for the other empty cells of the target house.
fn baseline(p: &HiddenSinglePuzzle) -> Canvas {
    let mut canvas = Canvas(Vec::new());
    canvas.paint(p.goal, Color::Green);
    for c in p.blue_cells() {
        canvas.paint(c, Color::Blue);
    }
    canvas
}

/// Empty non-goal house cells excluded for `d` by a clue in the same box.
pub fn box_constrained(p: &HiddenSinglePuzzle, d: Digit) -> Vec<Coord> {
    p.blue_cells()
        .into_iter()
        .filter(|&c| p.grid.blockers(c, d).iter().any(|b| b.box_index() == c.box_index()))
        .collect()
}

/// Empty non-goal house cells excluded for `d` only by clues on their
/// orthogonal line.
pub fn line_constrained(p: &HiddenSinglePuzzle, d: Digit) -> Vec<Coord> {
    let boxed = box_constrained(p, d);
    p.blue_cells()
        .into_iter()
        .filter(|c| !boxed.contains(c) && !p.grid.blockers(*c, d).is_empty())
        .collect()
}

pub fn feedback_for(p: &HiddenSinglePuzzle, response: Digit, mode: FeedbackMode) -> Feedback {
    let x = response;
    let mut canvas = baseline(p);
    let noun = p.house_type().noun();
    let message = match classify_response(p, x) {
        ResponseRole::InHouse => {
            if let Some(c) = p.target_house.cells().into_iter().find(|&c| p.grid.get(c) == Some(x)) {
                canvas.paint(c, Color::Red);
            }
            let place = match mode {
                FeedbackMode::Verbatim => "the",
                FeedbackMode::Corrected => "the green cell",
            };
            format!("{x} cannot be at {place} because {x} already exists in the same {noun} in the red cell.")
        }
        ResponseRole::Absent => {
            for (c, _) in p.grid.filled() {
                canvas.paint(c, Color::Red);
            }
            format!(
                "It is not certain that {x} must be at the green cell because {x} may potentially be in a blue cell. \
                 The red cells cannot be {x} because they already contain digits."
            )
        }
        ResponseRole::Distractor => {
            let open = open_distractor_cell(p);
            for c in p.blue_cells() {
                if Some(c) != open {
                    canvas.paint(c, Color::Red);
                }
            }
            format!(
                "It is not certain that {x} must be at the green cell because {x} may potentially be in the blue cell. \
                 Note that neither the green cell nor the blue cell share the same row, column, or box with {} {x}.",
                article(x, mode)
            )
        }
        ResponseRole::Target => {
            for c in p.target_house.cells() {
                if p.grid.get(c).is_some() {
                    canvas.paint(c, Color::Red);
                }
            }
            let boxed = box_constrained(p, x);
            let lined = line_constrained(p, x);
            boxed.iter().for_each(|&c| canvas.paint(c, Color::Purple));
            lined.iter().for_each(|&c| canvas.paint(c, Color::Orange));
            target_message(p, x, mode, !boxed.is_empty(), !lined.is_empty())
        }
    };
    Feedback { highlights: canvas.finish(), message }
}

/// The empty non-goal house cell that stays open for the distractor.
pub fn open_distractor_cell(p: &HiddenSinglePuzzle) -> Option<Coord> {
    p.grid
        .candidate_cells(p.target_house, p.distractor)
        .into_iter()
        .find(|&c| c != p.goal)
}

fn target_message(p: &HiddenSinglePuzzle, x: Digit, mode: FeedbackMode, boxed: bool, lined: bool) -> String {
    let a = article(x, mode);
    let noun = p.house_type().noun();
    let mut msg = format!(
        "{x} is correct! We can be certain that the green cell must contain {x} because no other cell in its {noun} can be {a} {x}. \
         The red cells cannot be {x} because they already contain digits."
    );
    if boxed {
        let verb = match mode {
            FeedbackMode::Verbatim => "they share they share",
            FeedbackMode::Corrected => "they share",
        };
        msg.push_str(&format!(" The empty purple cells cannot be {x} because {verb} the same box with {a} {x}."));
    }
    if lined {
        let lines = match p.house_type() {
            LineKind::Column => "rows",
            LineKind::Row => "columns",
        };
        msg.push_str(&format!(" The empty orange cells cannot be {x} because they share {lines} with other {x}s."));
    }
    msg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzle::{generate_puzzle, DigitSet, PuzzleFeatures};

    fn puzzle(ht: LineKind, seed: u64) -> HiddenSinglePuzzle {
        let f = PuzzleFeatures::new(ht, 4, 6, DigitSet::from_values([2, 4, 7, 8]).unwrap()).unwrap();
        generate_puzzle(&f, seed).unwrap()
    }

    #[test]
    fn in_house_message() {
        let p = puzzle(LineKind::Column, 1);
        let d = p.in_house[0];
        let f = feedback_for(&p, d, FeedbackMode::Verbatim);
        assert_eq!(
            f.message,
            format!("{d} cannot be at the because {d} already exists in the same column in the red cell.")
        );
        let red = f.cells_with(Color::Red);
        assert_eq!(red.len(), 1);
        assert_eq!(p.grid.get(red[0]), Some(d));
        let f = feedback_for(&p, d, FeedbackMode::Corrected);
        assert!(f.message.contains("cannot be at the green cell because"));
    }

    #[test]
    fn absent_marks_all_hints() {
        let p = puzzle(LineKind::Row, 2);
        let d = p.absent_digits()[0];
        let f = feedback_for(&p, d, FeedbackMode::Corrected);
        assert_eq!(f.cells_with(Color::Red).len(), 9);
        assert_eq!(f.cells_with(Color::Blue).len(), 5);
        assert_eq!(f.cells_with(Color::Green), vec![p.goal]);
    }

    #[test]
    fn distractor_leaves_one_blue_cell() {
        for seed in 0..50 {
            let p = puzzle(if seed % 2 == 0 { LineKind::Row } else { LineKind::Column }, seed);
            let f = feedback_for(&p, p.distractor, FeedbackMode::Corrected);
            let blue = f.cells_with(Color::Blue);
            assert_eq!(blue.len(), 1);
            assert_ne!(blue[0], p.goal);
            assert!(p.grid.is_legal_placement(blue[0], p.distractor).unwrap());
            assert_eq!(f.cells_with(Color::Red).len(), 4);
        }
    }

    #[test]
    fn target_covers_house() {
        for seed in 0..50 {
            let p = puzzle(LineKind::Column, seed);
            let f = feedback_for(&p, p.target, FeedbackMode::Verbatim);
            assert!(f.cells_with(Color::Blue).is_empty());
            assert_eq!(f.cells_with(Color::Red).len(), 3);
            assert_eq!(f.cells_with(Color::Purple).len() + f.cells_with(Color::Orange).len(), 5);
            assert!(f.message.starts_with(&format!("{} is correct!", p.target)));
            assert!(f.message.contains("they share they share the same box"));
        }
    }

    #[test]
    fn article_correction() {
        let mut p = (0..).map(|s| puzzle(LineKind::Row, s)).find(|p| p.target.get() != 8).unwrap();
        // force the distractor label to 8 for the message only
        p.distractor = Digit::new(8).unwrap();
        let v = feedback_for(&p, p.distractor, FeedbackMode::Verbatim);
        assert!(v.message.ends_with("row, column, or box with a 8."));
        let c = feedback_for(&p, p.distractor, FeedbackMode::Corrected);
        assert!(c.message.ends_with("row, column, or box with an 8."));
    }
}
