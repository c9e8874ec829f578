//! Randomized hidden-single construction.

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;
use thiserror::Error;

use super::{
    verify_puzzle, ConditionCombo, Hint, HiddenSinglePuzzle, PuzzleFeatures, PuzzleLayout,
};
use crate::grid::{Coord, Digit, Grid, House};
use crate::rng::{rng_from, SimRng};

/// Restarts allowed before giving up on a feature combination.
pub const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PuzzleError {
    #[error("invalid puzzle features: {0}")]
    InvalidFeatures(String),
    #[error("no puzzle found after {attempts} attempts")]
    GenerationFailure { attempts: usize },
}

/// Generates a puzzle with the given features. The same features and seed
/// always give the same puzzle.
pub fn generate_puzzle(features: &PuzzleFeatures, seed: u64) -> Result<HiddenSinglePuzzle, PuzzleError> {
    features.validate()?;
    let mut rng = rng_from(seed);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(mut p) = attempt(features, &mut rng) {
            p.seed = Some(seed);
            if verify_puzzle(&p).passed {
                return Ok(p);
            }
        }
    }
    Err(PuzzleError::GenerationFailure { attempts: MAX_ATTEMPTS })
}

struct Builder {
    grid: Grid,
    order: Vec<Hint>,
}

impl Builder {
    fn put(&mut self, c: Coord, d: Digit) {
        self.grid.place(c, d);
        self.order.push(Hint { coord: c, digit: d });
    }

    fn legal(&self, c: Coord, d: Digit) -> bool {
        self.grid.is_empty_at(c) && self.grid.is_legal_placement(c, d).unwrap_or(false)
    }
}

fn attempt(f: &PuzzleFeatures, rng: &mut SimRng) -> Option<HiddenSinglePuzzle> {
    let house = f.target_house();
    let goal = f.goal();
    let ortho = f.house_type.flipped();

    let set = f.digit_set.digits();
    let target = *set.choose(rng)?;
    let distractor = *set.iter().filter(|&&d| d != target).choose(rng)?;
    let others: Vec<Digit> = Digit::all().filter(|&d| d != target && d != distractor).collect();
    let in_house_digits: Vec<Digit> = others.choose_multiple(rng, 3).copied().collect();

    let mut b = Builder { grid: Grid::empty(), order: Vec::with_capacity(9) };

    // a box beside the goal that shares cells with the target house
    let mut boxes: Vec<u8> = house.cells().iter().map(|c| c.box_index()).collect();
    boxes.dedup();
    let constraint_box = *boxes.iter().filter(|&&bx| bx != goal.box_index()).choose(rng)?;
    let box_house = House::boxed(constraint_box).ok()?;
    let outside: Vec<Coord> = box_house.cells().into_iter().filter(|&c| !house.contains(c)).collect();
    let mut picked = outside.choose_multiple(rng, 2);
    let (tb, db) = (*picked.next()?, *picked.next()?);
    b.put(tb, target);
    b.put(db, distractor);

    // in-house digits on three of the five remaining cells
    let mut rest: Vec<Coord> = house
        .cells()
        .into_iter()
        .filter(|&c| c != goal && !box_house.contains(c))
        .collect();
    rest.shuffle(rng);
    let in_house_cells = [rest[0], rest[1], rest[2]];
    for (&c, &d) in in_house_cells.iter().zip(&in_house_digits) {
        b.put(c, d);
    }
    let line_cells = [rest[3], rest[4]];
    let a_idx = rng.gen_range(0..2);
    let cell_a = line_cells[a_idx];
    let cell_b = line_cells[1 - a_idx];

    let line_choice = |b: &Builder, rng: &mut SimRng, cell: Coord, d: Digit, avoid: &[Coord]| {
        ortho
            .line_through(cell)
            .cells()
            .into_iter()
            .filter(|&c| !house.contains(c) && b.legal(c, d) && avoid.iter().all(|&a| !c.sees(a)))
            .choose(rng)
    };

    let c = line_choice(&b, rng, cell_a, target, &[goal])?;
    b.put(c, target);
    let c = line_choice(&b, rng, cell_a, distractor, &[goal, cell_b])?;
    b.put(c, distractor);
    let c = line_choice(&b, rng, cell_b, target, &[goal])?;
    b.put(c, target);

    // third distractor: may only see house cells that are already closed to it
    let closed: Vec<Coord> = house
        .cells()
        .into_iter()
        .filter(|&c| !b.legal(c, distractor))
        .collect();
    let c = Coord::all()
        .filter(|&c| {
            !house.contains(c)
                && b.legal(c, distractor)
                && house.cells().iter().all(|&h| !h.sees(c) || closed.contains(&h))
        })
        .choose(rng)?;
    b.put(c, distractor);

    let mut hints = b.order;
    hints.shuffle(rng);
    let mut in_house: [Digit; 3] = in_house_digits.try_into().ok()?;
    in_house.sort();

    Some(HiddenSinglePuzzle {
        grid: b.grid,
        target_house: house,
        goal,
        target,
        distractor,
        in_house,
        features: *f,
        condition: ConditionCombo::CONTROL,
        hints,
        layout: PuzzleLayout {
            constraint_box,
            in_house_cells,
            line_cells,
            shared_line_cell: cell_a,
        },
        seed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzle::{has_redundant_distractor, DigitSet, LineKind};

    fn features(ht: LineKind, hi: u8, ci: u8) -> PuzzleFeatures {
        PuzzleFeatures::new(ht, hi, ci, DigitSet::from_values([1, 3, 6, 8]).unwrap()).unwrap()
    }

    #[test]
    fn every_position_generates() {
        for ht in [LineKind::Row, LineKind::Column] {
            for hi in 1..=9 {
                for ci in 1..=9 {
                    let f = features(ht, hi, ci);
                    let p = generate_puzzle(&f, (hi as u64) * 31 + ci as u64).unwrap();
                    let report = verify_puzzle(&p);
                    assert!(report.passed, "{ht:?} {hi} {ci}: {:?}", report.failures);
                    assert_eq!(p.goal, f.goal());
                }
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let f = features(LineKind::Column, 4, 2);
        assert_eq!(generate_puzzle(&f, 99).unwrap(), generate_puzzle(&f, 99).unwrap());
        assert_ne!(generate_puzzle(&f, 99).unwrap().grid, generate_puzzle(&f, 100).unwrap().grid);
    }

    #[test]
    fn target_and_distractor_come_from_digit_set() {
        let f = features(LineKind::Row, 7, 7);
        for seed in 0..200 {
            let p = generate_puzzle(&f, seed).unwrap();
            assert!(f.digit_set.contains(p.target));
            assert!(f.digit_set.contains(p.distractor));
            assert_ne!(p.target, p.distractor);
        }
    }

    #[test]
    fn layout_matches_grid() {
        let p = generate_puzzle(&features(LineKind::Column, 1, 1), 5).unwrap();
        for c in p.layout.in_house_cells {
            assert!(p.in_house.contains(&p.grid.get(c).unwrap()));
        }
        assert!(p.layout.line_cells.contains(&p.layout.shared_line_cell));
        assert_eq!(p.blue_cells().len(), 5);
        let open = p.grid.candidate_cells(p.target_house, p.distractor);
        assert_eq!(open.len(), 2);
        assert!(open.contains(&p.goal) && open.contains(&p.layout.target_only_line_cell()));
    }

    #[test]
    fn redundant_distractors_occur_sometimes() {
        let f = features(LineKind::Row, 5, 3);
        let n = 400;
        let r = (0..n).filter(|&s| has_redundant_distractor(&generate_puzzle(&f, s).unwrap())).count();
        assert!(r > 0 && r < n as usize);
    }
}
