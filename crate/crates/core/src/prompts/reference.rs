//! The published example puzzles, with their hint order and narration layout.

use crate::grid::{Coord, Digit};
use crate::puzzle::{Hint, HiddenSinglePuzzle, LineKind, PuzzleLayout};

fn c(r: u8, k: u8) -> Coord {
    Coord::new(r, k).expect("valid coordinate")
}

fn hints(list: &[(u8, u8, u8)]) -> Vec<Hint> {
    list.iter()
        .map(|&(r, k, d)| Hint { coord: c(r, k), digit: Digit::new(d).expect("valid digit") })
        .collect()
}

fn build(goal: Coord, list: &[(u8, u8, u8)], layout: PuzzleLayout) -> HiddenSinglePuzzle {
    HiddenSinglePuzzle::from_hints(LineKind::Column, goal, hints(list), layout).expect("reference puzzle is valid")
}

/// Zero-shot example (list and array forms); the answer is 9.
pub fn zero_shot() -> HiddenSinglePuzzle {
    build(
        c(1, 1),
        &[(6, 7, 9), (7, 4, 6), (2, 1, 7), (8, 2, 6), (9, 2, 9), (3, 4, 9), (4, 1, 5), (3, 9, 6), (5, 1, 8)],
        PuzzleLayout {
            constraint_box: 7,
            in_house_cells: [c(2, 1), c(4, 1), c(5, 1)],
            line_cells: [c(3, 1), c(6, 1)],
            shared_line_cell: c(3, 1),
        },
    )
}

fn column_one_layout() -> PuzzleLayout {
    PuzzleLayout {
        constraint_box: 4,
        in_house_cells: [c(8, 1), c(9, 1), c(7, 1)],
        line_cells: [c(3, 1), c(2, 1)],
        shared_line_cell: c(2, 1),
    }
}

/// Solved few-shot example; the answer is 5.
pub fn four_shot_example() -> HiddenSinglePuzzle {
    build(
        c(1, 1),
        &[(5, 3, 6), (9, 1, 1), (2, 5, 5), (6, 2, 5), (8, 1, 9), (7, 1, 7), (3, 8, 5), (2, 8, 6), (4, 9, 6)],
        column_one_layout(),
    )
}

/// Same puzzle as [`four_shot_example`] in the order used for the
/// target-first walk-through.
pub fn target_first_example() -> HiddenSinglePuzzle {
    build(
        c(1, 1),
        &[(8, 1, 9), (2, 5, 5), (9, 1, 1), (7, 1, 7), (5, 3, 6), (3, 8, 5), (6, 2, 5), (2, 8, 6), (4, 9, 6)],
        column_one_layout(),
    )
}

/// Distractor-first walk-through example; the answer is 6.
pub fn distractor_first_example() -> HiddenSinglePuzzle {
    build(
        c(4, 1),
        &[(8, 7, 6), (6, 1, 3), (2, 5, 9), (7, 8, 9), (1, 2, 9), (7, 4, 6), (5, 1, 1), (3, 3, 6), (9, 1, 5)],
        PuzzleLayout {
            constraint_box: 1,
            in_house_cells: [c(9, 1), c(6, 1), c(5, 1)],
            line_cells: [c(7, 1), c(8, 1)],
            shared_line_cell: c(7, 1),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzle::verify_puzzle;

    #[test]
    fn references_are_valid_puzzles() {
        for (p, answer, distractor) in [
            (zero_shot(), 9, 6),
            (four_shot_example(), 5, 6),
            (target_first_example(), 5, 6),
            (distractor_first_example(), 6, 9),
        ] {
            let r = verify_puzzle(&p);
            assert!(r.passed, "{:?}", r.failures);
            assert_eq!(p.target.get(), answer);
            assert_eq!(p.distractor.get(), distractor);
        }
    }
}
