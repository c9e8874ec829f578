//! Counterbalanced ordering of the 64 test trials.
//!
//! The eight (ht, hi, ci) combinations are arranged in a balanced Latin square
//! (Williams design): each row is one set of eight trials. The digit-set flag
//! is overlaid so that each set has four changed trials and each aligned pair
//! of sets covers all sixteen combinations.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::puzzle::ConditionCombo;
use crate::rng::rng_from;

pub const SET_SIZE: usize = 8;
pub const SET_COUNT: usize = 8;
pub const TEST_TRIALS: usize = SET_SIZE * SET_COUNT;

/// First row of the even-order Williams square: 0, 1, n-1, 2, n-2, ...
fn williams_first_row(n: usize) -> Vec<usize> {
    let mut row = vec![0];
    let (mut lo, mut hi) = (1, n - 1);
    while row.len() < n {
        row.push(lo);
        lo += 1;
        if row.len() < n {
            row.push(hi);
            hi -= 1;
        }
    }
    row
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSchedule {
    trials: Vec<ConditionCombo>,
}

impl TestSchedule {
    pub fn trials(&self) -> &[ConditionCombo] {
        &self.trials
    }

    pub fn sets(&self) -> impl Iterator<Item = &[ConditionCombo]> {
        self.trials.chunks(SET_SIZE)
    }

    pub fn from_trials(trials: Vec<ConditionCombo>) -> Result<Self, Vec<String>> {
        let s = TestSchedule { trials };
        let problems = check_schedule(&s);
        if problems.is_empty() {
            Ok(s)
        } else {
            Err(problems)
        }
    }
}

pub fn schedule_test(seed: u64) -> TestSchedule {
    let mut rng = rng_from(seed);
    let base = williams_first_row(SET_SIZE);
    let mut row_shift: Vec<usize> = (0..SET_COUNT).collect();
    row_shift.shuffle(&mut rng);
    let mut symbols: Vec<u8> = (0..SET_SIZE as u8).collect();
    symbols.shuffle(&mut rng);

    let mut trials = Vec::with_capacity(TEST_TRIALS);
    for pair in 0..SET_COUNT / 2 {
        let mut flagged: Vec<u8> = (0..SET_SIZE as u8).collect();
        flagged.shuffle(&mut rng);
        flagged.truncate(SET_SIZE / 2);
        for half in 0..2 {
            let shift = row_shift[pair * 2 + half];
            for &b in &base {
                let positional = symbols[(b + shift) % SET_SIZE];
                let ds = flagged.contains(&positional) == (half == 0);
                trials.push(ConditionCombo::from_positional(positional, ds));
            }
        }
    }
    TestSchedule { trials }
}

/// Every violated balance property, empty when the schedule is sound.
pub fn check_schedule(s: &TestSchedule) -> Vec<String> {
    let mut out = Vec::new();
    if s.trials.len() != TEST_TRIALS {
        out.push(format!("{} trials, expected {TEST_TRIALS}", s.trials.len()));
        return out;
    }
    let pos: Vec<Vec<usize>> = s
        .sets()
        .map(|set| set.iter().map(|c| c.positional_index() as usize).collect())
        .collect();
    for (i, set) in pos.iter().enumerate() {
        let mut seen = [false; SET_SIZE];
        set.iter().for_each(|&p| seen[p] = true);
        if seen.iter().any(|x| !x) {
            out.push(format!("set {i} does not contain all positional combos"));
        }
        let ds = s.trials[i * SET_SIZE..(i + 1) * SET_SIZE].iter().filter(|c| c.ds_changed).count();
        if ds != SET_SIZE / 2 {
            out.push(format!("set {i} has {ds} digit-set changes"));
        }
    }
    for j in 0..SET_SIZE {
        let mut seen = [false; SET_SIZE];
        pos.iter().for_each(|set| seen[set[j]] = true);
        if seen.iter().any(|x| !x) {
            out.push(format!("position {j} repeats a combo across sets"));
        }
    }
    let mut before = [[0usize; SET_SIZE]; SET_SIZE];
    let mut adjacent = [[0usize; SET_SIZE]; SET_SIZE];
    for set in &pos {
        for a in 0..SET_SIZE {
            for b in a + 1..SET_SIZE {
                before[set[a]][set[b]] += 1;
            }
            if a + 1 < SET_SIZE {
                adjacent[set[a]][set[a + 1]] += 1;
            }
        }
    }
    for x in 0..SET_SIZE {
        for y in 0..SET_SIZE {
            if x != y && (before[x][y] != SET_COUNT / 2 || adjacent[x][y] != 1) {
                out.push(format!(
                    "combo {x} precedes {y} {} times ({} adjacent)",
                    before[x][y], adjacent[x][y]
                ));
            }
        }
    }
    for (k, block) in s.trials.chunks(2 * SET_SIZE).enumerate() {
        let mut seen = [false; 16];
        block.iter().for_each(|c| seen[c.index() as usize] = true);
        if seen.iter().any(|x| !x) {
            out.push(format!("trials {}..{} miss a combo", k * 16 + 1, k * 16 + 16));
        }
    }
    out
}
