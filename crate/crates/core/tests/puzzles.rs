use hidden_single_core::grid::{Coord, Digit};
use hidden_single_core::prompts::reference;
use hidden_single_core::puzzle::{
    generate_puzzle, has_redundant_distractor, verify_puzzle, DigitSet, Hint, HiddenSinglePuzzle, LineKind,
    PuzzleFeatures, ResponseRole,
};

fn c(r: u8, k: u8) -> Coord {
    Coord::new(r, k).unwrap()
}

/// Empty house cells seen by at least two distractor instances, computed
/// directly from row, column and box arithmetic.
fn doubly_covered(p: &HiddenSinglePuzzle) -> Vec<Coord> {
    let clues: Vec<(u8, u8)> = p.instances(p.distractor).iter().map(|x| (x.row(), x.col())).collect();
    p.target_house
        .cells()
        .into_iter()
        .filter(|&x| p.grid.is_empty_at(x))
        .filter(|x| {
            clues
                .iter()
                .filter(|&&(r, k)| {
                    r == x.row() || k == x.col() || ((r - 1) / 3 == (x.row() - 1) / 3 && (k - 1) / 3 == (x.col() - 1) / 3)
                })
                .count()
                >= 2
        })
        .collect()
}

#[test]
fn redundant_distractor_example() {
    // the 6 in box 7 and the 6 in row 7 both rule out (7, 1)
    let p = reference::zero_shot();
    assert_eq!(doubly_covered(&p), vec![c(7, 1)]);
    assert!(has_redundant_distractor(&p));
}

#[test]
fn non_redundant_distractor_example() {
    // the same puzzle with the row-7 distractor moved to row 2, where it
    // only meets a filled cell of the house
    let base = reference::zero_shot();
    let hints: Vec<Hint> = base
        .hints
        .iter()
        .map(|h| if h.coord == c(7, 4) { Hint { coord: c(2, 4), digit: h.digit } } else { *h })
        .collect();
    let p = HiddenSinglePuzzle::from_hints(LineKind::Column, base.goal, hints, base.layout).unwrap();
    let report = verify_puzzle(&p);
    assert!(report.passed, "{:?}", report.failures);
    assert_eq!(p.distractor, Digit::new(6).unwrap());
    assert!(doubly_covered(&p).is_empty());
    assert!(!has_redundant_distractor(&p));
}

#[test]
fn redundancy_agrees_with_direct_count_on_generated_puzzles() {
    let ds = DigitSet::from_values([2, 4, 7, 9]).unwrap();
    for seed in 0..500u64 {
        let kind = if seed % 2 == 0 { LineKind::Row } else { LineKind::Column };
        let f = PuzzleFeatures::new(kind, (seed % 9) as u8 + 1, (seed / 9 % 9) as u8 + 1, ds).unwrap();
        let p = generate_puzzle(&f, seed).unwrap();
        assert_eq!(has_redundant_distractor(&p), !doubly_covered(&p).is_empty(), "seed {seed}");
    }
}

#[test]
fn figure_style_puzzle_is_reachable() {
    // digit set {1, 3, 6, 8} with target 3, distractor 1, in-house {2, 4, 5}
    let ds = DigitSet::from_values([1, 3, 6, 8]).unwrap();
    let f = PuzzleFeatures::new(LineKind::Row, 2, 7, ds).unwrap();
    let d = |v| Digit::new(v).unwrap();
    let found = (0..20_000u64).map(|s| generate_puzzle(&f, s).unwrap()).find(|p| {
        p.target == d(3) && p.distractor == d(1) && p.in_house == [d(2), d(4), d(5)]
    });
    let p = found.expect("some seed yields the figure's roles");
    assert_eq!(p.absent_digits(), vec![d(6), d(7), d(8), d(9)]);
    assert_eq!(p.digits_with_role(ResponseRole::Absent), p.absent_digits());
    assert!(verify_puzzle(&p).passed);
}
