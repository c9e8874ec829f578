//! Hidden-single puzzles: participant features, condition variants, the
//! puzzle record itself and response roles.
//!
//! A puzzle has exactly nine hints. Two digits (the target and the distractor)
//! appear three times each outside the target house, three in-house digits
//! appear once each inside it, and the remaining four digits are absent. Only
//! the target is forced into the goal cell; the distractor keeps a second
//! candidate cell in the house.

mod generate;
mod verify;

pub use generate::{generate_puzzle, PuzzleError, MAX_ATTEMPTS};
pub use verify::{has_redundant_distractor, verify_puzzle, VerificationReport, VerifyFailure};

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{Coord, Digit, Grid, House, HouseKind};
use crate::rng::rng_from;

pub const FORMAT_VERSION: u32 = 1;

/// Orientation of the target house.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    Row,
    Column,
}

impl LineKind {
    pub fn flipped(self) -> Self {
        match self {
            LineKind::Row => LineKind::Column,
            LineKind::Column => LineKind::Row,
        }
    }

    pub fn house_kind(self) -> HouseKind {
        match self {
            LineKind::Row => HouseKind::Row,
            LineKind::Column => HouseKind::Column,
        }
    }

    pub fn noun(self) -> &'static str {
        self.house_kind().noun()
    }

    /// The line through `c` with this orientation.
    pub fn line_through(self, c: Coord) -> House {
        match self {
            LineKind::Row => House::row(c.row()).expect("valid row"),
            LineKind::Column => House::column(c.col()).expect("valid column"),
        }
    }
}

/// Four distinct digits, kept sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Digit>", into = "Vec<Digit>")]
pub struct DigitSet([Digit; 4]);

impl DigitSet {
    pub fn new(mut digits: [Digit; 4]) -> Result<Self, PuzzleError> {
        digits.sort();
        if digits.windows(2).any(|w| w[0] == w[1]) {
            return Err(PuzzleError::InvalidFeatures("digit set has repeated digits".into()));
        }
        Ok(DigitSet(digits))
    }

    pub fn from_values(values: [u8; 4]) -> Result<Self, PuzzleError> {
        let mut digits = [Digit::new(1).expect("1 is a digit"); 4];
        for (slot, v) in digits.iter_mut().zip(values) {
            *slot = Digit::new(v).map_err(|e| PuzzleError::InvalidFeatures(e.to_string()))?;
        }
        DigitSet::new(digits)
    }

    pub fn digits(&self) -> [Digit; 4] {
        self.0
    }

    pub fn contains(&self, d: Digit) -> bool {
        self.0.contains(&d)
    }

    pub fn is_disjoint(&self, other: &DigitSet) -> bool {
        self.0.iter().all(|d| !other.contains(*d))
    }
}

impl TryFrom<Vec<Digit>> for DigitSet {
    type Error = PuzzleError;
    fn try_from(v: Vec<Digit>) -> Result<Self, Self::Error> {
        let arr: [Digit; 4] = v
            .try_into()
            .map_err(|_| PuzzleError::InvalidFeatures("digit set must have 4 digits".into()))?;
        DigitSet::new(arr)
    }
}

impl From<DigitSet> for Vec<Digit> {
    fn from(s: DigitSet) -> Self {
        s.0.to_vec()
    }
}

/// The four controlled puzzle features.
///
/// For a row house the goal is `(house_index, cell_index)`; for a column house
/// it is `(cell_index, house_index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PuzzleFeatures {
    pub house_type: LineKind,
    pub house_index: u8,
    pub cell_index: u8,
    pub digit_set: DigitSet,
}

impl PuzzleFeatures {
    pub fn new(
        house_type: LineKind,
        house_index: u8,
        cell_index: u8,
        digit_set: DigitSet,
    ) -> Result<Self, PuzzleError> {
        if !(1..=9).contains(&house_index) || !(1..=9).contains(&cell_index) {
            return Err(PuzzleError::InvalidFeatures(format!(
                "house index {house_index} / cell index {cell_index} out of range"
            )));
        }
        Ok(PuzzleFeatures { house_type, house_index, cell_index, digit_set })
    }

    pub fn validate(&self) -> Result<(), PuzzleError> {
        PuzzleFeatures::new(self.house_type, self.house_index, self.cell_index, self.digit_set)
            .map(|_| ())
    }

    pub fn target_house(&self) -> House {
        House::new(self.house_type.house_kind(), self.house_index).expect("validated index")
    }

    pub fn goal(&self) -> Coord {
        match self.house_type {
            LineKind::Row => Coord::new(self.house_index, self.cell_index),
            LineKind::Column => Coord::new(self.cell_index, self.house_index),
        }
        .expect("validated indices")
    }

    /// Features for the same goal cell seen through the other house type.
    pub fn with_flipped_house(&self) -> Self {
        PuzzleFeatures {
            house_type: self.house_type.flipped(),
            house_index: self.cell_index,
            cell_index: self.house_index,
            digit_set: self.digit_set,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParticipantAssignment {
    pub training: PuzzleFeatures,
    pub transfer_digit_set: DigitSet,
}

/// Draws a participant's training features and transfer digit set.
pub fn assign_participant(seed: u64) -> ParticipantAssignment {
    let mut rng = rng_from(seed);
    let house_type = if rng.gen_bool(0.5) { LineKind::Row } else { LineKind::Column };
    let house_index = rng.gen_range(1..=9);
    let cell_index = rng.gen_range(1..=9);
    let mut all: Vec<Digit> = Digit::all().collect();
    all.shuffle(&mut rng);
    let training = DigitSet::new([all[0], all[1], all[2], all[3]]).expect("distinct");
    let remaining = &all[4..];
    let transfer: Vec<Digit> = remaining.choose_multiple(&mut rng, 4).copied().collect();
    let transfer = DigitSet::try_from(transfer).expect("distinct");
    ParticipantAssignment {
        training: PuzzleFeatures { house_type, house_index, cell_index, digit_set: training },
        transfer_digit_set: transfer,
    }
}

/// Which features of a test puzzle differ from training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ConditionCombo {
    pub ds_changed: bool,
    pub ht_changed: bool,
    pub hi_changed: bool,
    pub ci_changed: bool,
}

impl ConditionCombo {
    pub const CONTROL: ConditionCombo =
        ConditionCombo { ds_changed: false, ht_changed: false, hi_changed: false, ci_changed: false };

    /// Bit layout: ds = 8, ht = 4, hi = 2, ci = 1.
    pub fn from_index(i: u8) -> Self {
        ConditionCombo {
            ds_changed: i & 8 != 0,
            ht_changed: i & 4 != 0,
            hi_changed: i & 2 != 0,
            ci_changed: i & 1 != 0,
        }
    }

    pub fn index(self) -> u8 {
        (self.ds_changed as u8) << 3
            | (self.ht_changed as u8) << 2
            | (self.hi_changed as u8) << 1
            | self.ci_changed as u8
    }

    /// Index of the (ht, hi, ci) part, `0..8`.
    pub fn positional_index(self) -> u8 {
        self.index() & 7
    }

    pub fn from_positional(positional: u8, ds_changed: bool) -> Self {
        ConditionCombo { ds_changed, ..ConditionCombo::from_index(positional & 7) }
    }

    pub fn all() -> impl Iterator<Item = ConditionCombo> {
        (0..16).map(ConditionCombo::from_index)
    }

    pub fn goal_position_changed(self) -> bool {
        self.hi_changed || self.ci_changed
    }
}

fn resample_other(rng: &mut impl Rng, current: u8) -> u8 {
    (1..=9u8).filter(|&v| v != current).choose(rng).expect("eight alternatives")
}

/// Features of a test puzzle in the given condition.
///
/// A house-type change keeps the goal cell in place (the target house becomes
/// the goal's row or column of the other orientation); house and cell index
/// changes then move the goal away from it.
pub fn derive_condition_features(
    assignment: &ParticipantAssignment,
    condition: ConditionCombo,
    rng: &mut impl Rng,
) -> PuzzleFeatures {
    let mut f = assignment.training;
    if condition.ds_changed {
        f.digit_set = assignment.transfer_digit_set;
    }
    if condition.ht_changed {
        f = f.with_flipped_house();
    }
    if condition.hi_changed {
        f.house_index = resample_other(rng, f.house_index);
    }
    if condition.ci_changed {
        f.cell_index = resample_other(rng, f.cell_index);
    }
    f
}

pub fn derive_condition_features_seeded(
    assignment: &ParticipantAssignment,
    condition: ConditionCombo,
    seed: u64,
) -> PuzzleFeatures {
    derive_condition_features(assignment, condition, &mut rng_from(seed))
}

/// Category of a response digit relative to a puzzle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseRole {
    InHouse,
    Absent,
    Distractor,
    Target,
}

impl ResponseRole {
    /// Column order of the emission matrix.
    pub const ALL: [ResponseRole; 4] =
        [ResponseRole::InHouse, ResponseRole::Absent, ResponseRole::Distractor, ResponseRole::Target];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ResponseRole::InHouse => "in_house",
            ResponseRole::Absent => "absent",
            ResponseRole::Distractor => "distractor",
            ResponseRole::Target => "target",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.as_str() == s)
    }

    pub fn is_prevalent(self) -> bool {
        matches!(self, ResponseRole::Target | ResponseRole::Distractor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hint {
    #[serde(flatten)]
    pub coord: Coord,
    pub digit: Digit,
}

/// How the hints were laid out during generation. Narrations and tutorials
/// walk the puzzle in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PuzzleLayout {
    /// Box holding one target and one distractor next to the target house.
    pub constraint_box: u8,
    /// In-house cells in placement order.
    pub in_house_cells: [Coord; 3],
    /// The two house cells excluded by orthogonal lines, in draw order.
    pub line_cells: [Coord; 2],
    /// The line cell whose orthogonal line holds both a target and a distractor.
    pub shared_line_cell: Coord,
}

impl PuzzleLayout {
    /// The line cell constrained only by the target; it stays open for the distractor.
    pub fn target_only_line_cell(&self) -> Coord {
        if self.line_cells[0] == self.shared_line_cell {
            self.line_cells[1]
        } else {
            self.line_cells[0]
        }
    }
}

pub(crate) mod grid_compact {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::grid::Grid;

    pub fn serialize<S: Serializer>(g: &Grid, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&g.to_compact())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Grid, D::Error> {
        let s = String::deserialize(d)?;
        Grid::from_compact(&s).map_err(serde::de::Error::custom)
    }
}

/// A generated (or loaded) puzzle. Loaded records may violate the puzzle
/// invariants; [`verify_puzzle`] reports on them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenSinglePuzzle {
    #[serde(with = "grid_compact")]
    pub grid: Grid,
    pub target_house: House,
    pub goal: Coord,
    pub target: Digit,
    pub distractor: Digit,
    pub in_house: [Digit; 3],
    #[serde(flatten)]
    pub features: PuzzleFeatures,
    pub condition: ConditionCombo,
    /// Hints in presentation order.
    pub hints: Vec<Hint>,
    pub layout: PuzzleLayout,
    pub seed: Option<u64>,
}

impl HiddenSinglePuzzle {
    /// Builds a puzzle from explicit hints, inferring digit roles.
    ///
    /// The target is the thrice-placed digit with the goal as its only
    /// candidate in the house. The remaining digit set members are filled with
    /// the smallest absent digits.
    pub fn from_hints(
        house_type: LineKind,
        goal: Coord,
        hints: Vec<Hint>,
        layout: PuzzleLayout,
    ) -> Result<Self, PuzzleError> {
        let mut grid = Grid::empty();
        for h in &hints {
            if grid.get(h.coord).is_some() {
                return Err(PuzzleError::InvalidFeatures(format!("duplicate hint at {}", h.coord)));
            }
            grid.place(h.coord, h.digit);
        }
        let target_house = house_type.line_through(goal);
        let triples: Vec<Digit> = Digit::all().filter(|&d| grid.count_of(d) == 3).collect();
        if triples.len() != 2 {
            return Err(PuzzleError::InvalidFeatures("expected two digits with three hints".into()));
        }
        let (target, distractor) = if grid.candidate_cells(target_house, triples[0]) == [goal] {
            (triples[0], triples[1])
        } else {
            (triples[1], triples[0])
        };
        let mut in_house: Vec<Digit> =
            target_house.cells().iter().filter_map(|&c| grid.get(c)).collect();
        in_house.sort();
        let in_house: [Digit; 3] = in_house
            .try_into()
            .map_err(|_| PuzzleError::InvalidFeatures("expected three in-house digits".into()))?;
        let absent: Vec<Digit> = Digit::all().filter(|&d| grid.count_of(d) == 0).collect();
        if absent.len() < 2 {
            return Err(PuzzleError::InvalidFeatures("too few absent digits".into()));
        }
        let digit_set = DigitSet::new([target, distractor, absent[0], absent[1]])?;
        let (house_index, cell_index) = match house_type {
            LineKind::Row => (goal.row(), goal.col()),
            LineKind::Column => (goal.col(), goal.row()),
        };
        Ok(HiddenSinglePuzzle {
            grid,
            target_house,
            goal,
            target,
            distractor,
            in_house,
            features: PuzzleFeatures::new(house_type, house_index, cell_index, digit_set)?,
            condition: ConditionCombo::CONTROL,
            hints,
            layout,
            seed: None,
        })
    }

    pub fn house_type(&self) -> LineKind {
        self.features.house_type
    }

    pub fn absent_digits(&self) -> Vec<Digit> {
        Digit::all()
            .filter(|&d| d != self.target && d != self.distractor && !self.in_house.contains(&d))
            .collect()
    }

    /// Instances of `d` on the grid, in reading order.
    pub fn instances(&self, d: Digit) -> Vec<Coord> {
        self.grid.filled().filter(|&(_, x)| x == d).map(|(c, _)| c).collect()
    }

    /// Empty non-goal cells of the target house.
    pub fn blue_cells(&self) -> Vec<Coord> {
        self.target_house
            .cells()
            .into_iter()
            .filter(|&c| c != self.goal && self.grid.is_empty_at(c))
            .collect()
    }

    pub fn role_of(&self, d: Digit) -> ResponseRole {
        classify_response(self, d)
    }

    pub fn digits_with_role(&self, role: ResponseRole) -> Vec<Digit> {
        Digit::all().filter(|&d| classify_response(self, d) == role).collect()
    }

    pub fn to_record(&self) -> PuzzleRecord {
        PuzzleRecord { format_version: FORMAT_VERSION, puzzle: self.clone() }
    }
}

/// Versioned serialized form of a puzzle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuzzleRecord {
    pub format_version: u32,
    #[serde(flatten)]
    pub puzzle: HiddenSinglePuzzle,
}

pub fn classify_response(p: &HiddenSinglePuzzle, d: Digit) -> ResponseRole {
    if d == p.target {
        ResponseRole::Target
    } else if d == p.distractor {
        ResponseRole::Distractor
    } else if p.in_house.contains(&d) {
        ResponseRole::InHouse
    } else {
        ResponseRole::Absent
    }
}
