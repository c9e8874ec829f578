//! Sudoku grid semantics: digits, coordinates, houses and the single-house
//! deductions used by the task (contradictions, full house, candidates).
//!
//! Coordinates are 1-based everywhere, including serialized forms.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("digit out of range: {0}")]
    DigitOutOfRange(u8),
    #[error("coordinate out of range: ({0}, {1})")]
    CoordOutOfRange(u8, u8),
    #[error("house index out of range: {0}")]
    HouseOutOfRange(u8),
    #[error("cell {0} is already filled")]
    Occupied(Coord),
    #[error("house {0} is not completely filled")]
    HouseNotFull(House),
    #[error("house {0} has more than one repeated digit")]
    MultipleContradictions(House),
    #[error("house {house} has {empty} empty cells, expected exactly one")]
    WrongEmptyCount { house: House, empty: usize },
    #[error("malformed grid text: {0}")]
    Parse(String),
}

/// A Sudoku digit, always in `1..=9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Digit(u8);

impl Digit {
    pub fn new(value: u8) -> Result<Self, GridError> {
        if (1..=9).contains(&value) {
            Ok(Digit(value))
        } else {
            Err(GridError::DigitOutOfRange(value))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Digit> {
        (1..=9).map(Digit)
    }
}

impl TryFrom<u8> for Digit {
    type Error = GridError;
    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Digit::new(value)
    }
}

impl From<Digit> for u8 {
    fn from(d: Digit) -> u8 {
        d.0
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A cell position, `row` and `col` both in `1..=9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCoord", into = "RawCoord")]
pub struct Coord {
    row: u8,
    col: u8,
}

#[derive(Serialize, Deserialize)]
struct RawCoord {
    row: u8,
    col: u8,
}

impl TryFrom<RawCoord> for Coord {
    type Error = GridError;
    fn try_from(raw: RawCoord) -> Result<Self, Self::Error> {
        Coord::new(raw.row, raw.col)
    }
}

impl From<Coord> for RawCoord {
    fn from(c: Coord) -> Self {
        RawCoord { row: c.row, col: c.col }
    }
}

impl Coord {
    pub fn new(row: u8, col: u8) -> Result<Self, GridError> {
        if (1..=9).contains(&row) && (1..=9).contains(&col) {
            Ok(Coord { row, col })
        } else {
            Err(GridError::CoordOutOfRange(row, col))
        }
    }

    pub fn row(self) -> u8 {
        self.row
    }

    pub fn col(self) -> u8 {
        self.col
    }

    /// Box index in `1..=9`, numbered left to right, top to bottom.
    pub fn box_index(self) -> u8 {
        3 * ((self.row - 1) / 3) + (self.col - 1) / 3 + 1
    }

    pub fn all() -> impl Iterator<Item = Coord> {
        (1..=9).flat_map(|row| (1..=9).map(move |col| Coord { row, col }))
    }

    fn offset(self) -> usize {
        (self.row as usize - 1) * 9 + (self.col as usize - 1)
    }

    fn from_offset(i: usize) -> Coord {
        Coord {
            row: (i / 9) as u8 + 1,
            col: (i % 9) as u8 + 1,
        }
    }

    /// True when the two cells share a row, column or box (and are distinct).
    pub fn sees(self, other: Coord) -> bool {
        self != other
            && (self.row == other.row
                || self.col == other.col
                || self.box_index() == other.box_index())
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(row {}, column {})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HouseKind {
    Row,
    Column,
    Box,
}

impl HouseKind {
    pub fn noun(self) -> &'static str {
        match self {
            HouseKind::Row => "row",
            HouseKind::Column => "column",
            HouseKind::Box => "box",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawHouse", into = "RawHouse")]
pub struct House {
    kind: HouseKind,
    index: u8,
}

#[derive(Serialize, Deserialize)]
struct RawHouse {
    kind: HouseKind,
    index: u8,
}

impl TryFrom<RawHouse> for House {
    type Error = GridError;
    fn try_from(raw: RawHouse) -> Result<Self, Self::Error> {
        House::new(raw.kind, raw.index)
    }
}

impl From<House> for RawHouse {
    fn from(h: House) -> Self {
        RawHouse { kind: h.kind, index: h.index }
    }
}

impl House {
    pub fn new(kind: HouseKind, index: u8) -> Result<Self, GridError> {
        if (1..=9).contains(&index) {
            Ok(House { kind, index })
        } else {
            Err(GridError::HouseOutOfRange(index))
        }
    }

    pub fn row(index: u8) -> Result<Self, GridError> {
        House::new(HouseKind::Row, index)
    }

    pub fn column(index: u8) -> Result<Self, GridError> {
        House::new(HouseKind::Column, index)
    }

    pub fn boxed(index: u8) -> Result<Self, GridError> {
        House::new(HouseKind::Box, index)
    }

    pub fn kind(self) -> HouseKind {
        self.kind
    }

    pub fn index(self) -> u8 {
        self.index
    }

    /// The nine member cells in reading order.
    pub fn cells(self) -> [Coord; 9] {
        let i = self.index;
        std::array::from_fn(|k| {
            let k = k as u8;
            match self.kind {
                HouseKind::Row => Coord { row: i, col: k + 1 },
                HouseKind::Column => Coord { row: k + 1, col: i },
                HouseKind::Box => Coord {
                    row: 3 * ((i - 1) / 3) + k / 3 + 1,
                    col: 3 * ((i - 1) % 3) + k % 3 + 1,
                },
            }
        })
    }

    pub fn contains(self, c: Coord) -> bool {
        match self.kind {
            HouseKind::Row => c.row == self.index,
            HouseKind::Column => c.col == self.index,
            HouseKind::Box => c.box_index() == self.index,
        }
    }

    /// The three houses a cell belongs to.
    pub fn of(c: Coord) -> [House; 3] {
        [
            House { kind: HouseKind::Row, index: c.row },
            House { kind: HouseKind::Column, index: c.col },
            House { kind: HouseKind::Box, index: c.box_index() },
        ]
    }
}

impl fmt::Display for House {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.noun(), self.index)
    }
}

/// The 20 cells sharing a row, column or box with `c`, in reading order.
pub fn peers(c: Coord) -> Vec<Coord> {
    Coord::all().filter(|&o| c.sees(o)).collect()
}

/// An 81-cell grid. Constraint-violating states are representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    cells: [Option<Digit>; 81],
}

impl Default for Grid {
    fn default() -> Self {
        Grid { cells: [None; 81] }
    }
}

impl Grid {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn get(&self, c: Coord) -> Option<Digit> {
        self.cells[c.offset()]
    }

    pub fn set(&mut self, c: Coord, d: Option<Digit>) {
        self.cells[c.offset()] = d;
    }

    pub fn place(&mut self, c: Coord, d: Digit) {
        self.set(c, Some(d));
    }

    pub fn is_empty_at(&self, c: Coord) -> bool {
        self.get(c).is_none()
    }

    /// Filled cells in reading order.
    pub fn filled(&self) -> impl Iterator<Item = (Coord, Digit)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|d| (Coord::from_offset(i), d)))
    }

    pub fn filled_count(&self) -> usize {
        self.cells.iter().filter(|d| d.is_some()).count()
    }

    pub fn count_of(&self, d: Digit) -> usize {
        self.cells.iter().filter(|&&x| x == Some(d)).count()
    }

    /// Whether `d` can be written into the empty cell `c` without repeating
    /// a digit in any of its houses.
    pub fn is_legal_placement(&self, c: Coord, d: Digit) -> Result<bool, GridError> {
        if !self.is_empty_at(c) {
            return Err(GridError::Occupied(c));
        }
        Ok(!peers(c).into_iter().any(|p| self.get(p) == Some(d)))
    }

    /// Peer cells of `c` holding `d`.
    pub fn blockers(&self, c: Coord, d: Digit) -> Vec<Coord> {
        peers(c).into_iter().filter(|&p| self.get(p) == Some(d)).collect()
    }

    /// The two cells of a full house holding the same digit, or `None` when the
    /// house is a permutation of 1..9.
    pub fn find_contradiction(&self, h: House) -> Result<Option<(Coord, Coord)>, GridError> {
        let cells = h.cells();
        let mut seen: [Option<Coord>; 10] = [None; 10];
        let mut found = None;
        for c in cells {
            let d = self.get(c).ok_or(GridError::HouseNotFull(h))?;
            match seen[d.get() as usize] {
                Some(first) => {
                    if found.is_some() {
                        return Err(GridError::MultipleContradictions(h));
                    }
                    found = Some((first, c));
                }
                None => seen[d.get() as usize] = Some(c),
            }
        }
        Ok(found)
    }

    /// The digit missing from a house with exactly one empty cell.
    pub fn full_house_missing(&self, h: House) -> Result<Digit, GridError> {
        let empty = h.cells().iter().filter(|&&c| self.is_empty_at(c)).count();
        if empty != 1 {
            return Err(GridError::WrongEmptyCount { house: h, empty });
        }
        let present: Vec<Digit> = h.cells().iter().filter_map(|&c| self.get(c)).collect();
        Digit::all()
            .find(|d| !present.contains(d))
            // 8 filled cells with a repeat leave two digits missing; report the smallest
            .ok_or(GridError::WrongEmptyCount { house: h, empty })
    }

    /// Empty cells of `h` where `d` is a legal placement.
    pub fn candidate_cells(&self, h: House, d: Digit) -> Vec<Coord> {
        h.cells()
            .into_iter()
            .filter(|&c| self.is_empty_at(c) && self.is_legal_placement(c, d).unwrap_or(false))
            .collect()
    }

    /// No digit repeats within the house (empty cells ignored).
    pub fn house_is_valid(&self, h: House) -> bool {
        let mut seen = [false; 10];
        for c in h.cells() {
            if let Some(d) = self.get(c) {
                if std::mem::replace(&mut seen[d.get() as usize], true) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_valid(&self) -> bool {
        (1..=9).all(|i| {
            [HouseKind::Row, HouseKind::Column, HouseKind::Box]
                .into_iter()
                .all(|k| self.house_is_valid(House { kind: k, index: i }))
        })
    }

    /// 81 characters in reading order, `0` for empty cells.
    pub fn to_compact(&self) -> String {
        self.cells
            .iter()
            .map(|d| match d {
                Some(d) => (b'0' + d.get()) as char,
                None => '0',
            })
            .collect()
    }

    pub fn from_compact(s: &str) -> Result<Self, GridError> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.len() != 81 {
            return Err(GridError::Parse(format!("expected 81 cells, found {}", chars.len())));
        }
        let mut g = Grid::empty();
        for (i, ch) in chars.into_iter().enumerate() {
            let v = ch
                .to_digit(10)
                .ok_or_else(|| GridError::Parse(format!("unexpected character {ch:?}")))?;
            if v > 0 {
                g.cells[i] = Some(Digit(v as u8));
            }
        }
        Ok(g)
    }

    /// Nine lines of nine characters with `0` for empty, each line ending in LF.
    pub fn to_text(&self) -> String {
        let compact = self.to_compact();
        let mut out = String::with_capacity(90);
        for line in compact.as_bytes().chunks(9) {
            out.push_str(std::str::from_utf8(line).expect("ascii"));
            out.push('\n');
        }
        out
    }

    pub fn from_text(s: &str) -> Result<Self, GridError> {
        let lines: Vec<&str> = s.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        if lines.len() != 9 || lines.iter().any(|l| l.chars().count() != 9) {
            return Err(GridError::Parse("expected 9 lines of 9 characters".into()));
        }
        Grid::from_compact(&lines.concat())
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
