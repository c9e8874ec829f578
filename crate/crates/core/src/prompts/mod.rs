//! Text prompts for language models: list and array encodings, few-shot and
//! chain-of-thought assembly, and answer parsing.

mod batch;
pub mod reference;

pub use batch::{
    results_to_csv, run_batch, write_dry_run, BatchItem, BatchOptions, BatchResult, Completer,
    CompletionError, EndpointConfig, HttpCompleter, ResultRow,
};

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Coord, Digit, Grid, House};
use crate::puzzle::HiddenSinglePuzzle;
use crate::rng::rng_from;

pub const PREAMBLE: &str = "I am a highly intelligent puzzle solving bot.";
const QUESTION: &str = "Q: Consider a Sudoku grid with the following numbers:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    List,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CotStyle {
    None,
    TargetFirst,
    DistractorFirst,
    /// Two target-first and two distractor-first shots in seeded order.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PromptSpec {
    pub representation: Representation,
    pub shots: usize,
    pub cot: CotStyle,
    pub preamble: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PromptError {
    #[error("shot count must be 0 or 4, got {0}")]
    ShotCount(usize),
    #[error("chain-of-thought prompts need 4 shots")]
    CotWithoutShots,
    #[error("expected {expected} shot puzzles, got {got}")]
    WrongShotPuzzles { expected: usize, got: usize },
    #[error("shot puzzle cannot be narrated: {0}")]
    Narration(String),
}

impl PromptSpec {
    pub fn validate(&self) -> Result<(), PromptError> {
        if self.shots != 0 && self.shots != 4 {
            return Err(PromptError::ShotCount(self.shots));
        }
        if self.cot != CotStyle::None && self.shots != 4 {
            return Err(PromptError::CotWithoutShots);
        }
        Ok(())
    }

    /// Short identifier such as `list-4shot-mixed`.
    pub fn label(&self) -> String {
        let rep = match self.representation {
            Representation::List => "list",
            Representation::Array => "array",
        };
        let cot = match self.cot {
            CotStyle::None => "plain",
            CotStyle::TargetFirst => "target-first",
            CotStyle::DistractorFirst => "distractor-first",
            CotStyle::Mixed => "mixed",
        };
        format!("{rep}-{}shot-{cot}{}", self.shots, if self.preamble { "" } else { "-nopreamble" })
    }

    /// Inverse of [`PromptSpec::label`]; the result is validated.
    pub fn parse(label: &str) -> Option<Self> {
        let (body, preamble) = match label.strip_suffix("-nopreamble") {
            Some(b) => (b, false),
            None => (label, true),
        };
        let (rep, rest) = body.split_once('-')?;
        let representation = match rep {
            "list" => Representation::List,
            "array" => Representation::Array,
            _ => return None,
        };
        let (shots, cot) = rest.split_once("shot-")?;
        let cot = match cot {
            "plain" => CotStyle::None,
            "target-first" => CotStyle::TargetFirst,
            "distractor-first" => CotStyle::DistractorFirst,
            "mixed" => CotStyle::Mixed,
            _ => return None,
        };
        let spec = PromptSpec { representation, shots: shots.parse().ok()?, cot, preamble };
        spec.validate().ok().map(|_| spec)
    }

    /// The configurations of the original runs.
    pub fn standard() -> Vec<PromptSpec> {
        let mut out = Vec::new();
        for representation in [Representation::List, Representation::Array] {
            out.push(PromptSpec { representation, shots: 0, cot: CotStyle::None, preamble: true });
            for cot in [CotStyle::None, CotStyle::TargetFirst, CotStyle::DistractorFirst, CotStyle::Mixed] {
                out.push(PromptSpec { representation, shots: 4, cot, preamble: true });
            }
        }
        out
    }
}

/// `A`, `A or B`, `A, B, or C`.
fn join_items(items: &[String], conj: &str) -> String {
    match items {
        [] => String::new(),
        [a] => a.clone(),
        [a, b] => format!("{a} {conj} {b}"),
        [rest @ .., last] => format!("{}, {conj} {last}", rest.join(", ")),
    }
}

fn cell_name(c: Coord) -> String {
    c.to_string()
}

/// Question block up to and including the answer stem (no trailing newline).
fn question_body(p: &HiddenSinglePuzzle, rep: Representation) -> (String, String) {
    let mut s = String::from(QUESTION);
    s.push('\n');
    let noun = p.house_type().noun();
    match rep {
        Representation::List => {
            for h in &p.hints {
                s.push_str(&format!("{} contains {}\n", h.coord, h.digit));
            }
            s.push_str(&format!("What number must {} contain?\n", p.goal));
            s.push_str(&format!("Hint: use the hidden single technique along {}.\n", p.target_house));
            (s, format!("A: {} must contain", p.goal))
        }
        Representation::Array => {
            for r in 1..=9 {
                let row: Vec<String> = (1..=9)
                    .map(|c| {
                        let coord = Coord::new(r, c).expect("in range");
                        if coord == p.goal {
                            "X".to_string()
                        } else {
                            p.grid.get(coord).map_or("0".to_string(), |d| d.to_string())
                        }
                    })
                    .collect();
                s.push_str(&format!("[{}]\n", row.join(" ")));
            }
            s.push_str("What number must X be?\n");
            s.push_str(&format!("Hint: use the hidden single technique along the {noun} that contains X.\n"));
            (s, "A: X must be".to_string())
        }
    }
}

pub fn encode_list(p: &HiddenSinglePuzzle) -> String {
    let (body, stem) = question_body(p, Representation::List);
    body + &stem
}

pub fn encode_array(p: &HiddenSinglePuzzle) -> String {
    let (body, stem) = question_body(p, Representation::Array);
    body + &stem
}

pub fn encode(p: &HiddenSinglePuzzle, rep: Representation) -> String {
    match rep {
        Representation::List => encode_list(p),
        Representation::Array => encode_array(p),
    }
}

/// Which prevalent digit a chain-of-thought shot checks first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    TargetFirst,
    DistractorFirst,
}

/// One exclusion claimed by a narration; checkable against the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exclusion {
    Filled(Coord),
    SharedBox { cell: Coord, clue: Coord },
    SharedLine { cell: Coord, clue: Coord },
}

fn instance_in(p: &HiddenSinglePuzzle, d: Digit, house: House) -> Option<Coord> {
    house.cells().into_iter().find(|&c| p.grid.get(c) == Some(d))
}

/// The exclusions a narration for `candidate` walks through, in order.
pub fn narration_steps(p: &HiddenSinglePuzzle, candidate: Digit) -> Result<Vec<Exclusion>, PromptError> {
    let err = |m: &str| PromptError::Narration(m.to_string());
    let mut steps: Vec<Exclusion> = p.layout.in_house_cells.iter().map(|&c| Exclusion::Filled(c)).collect();
    let bx = House::boxed(p.layout.constraint_box).map_err(|e| err(&e.to_string()))?;
    let clue = instance_in(p, candidate, bx).ok_or_else(|| err("no candidate instance in the constraint box"))?;
    for c in p.target_house.cells().into_iter().filter(|&c| bx.contains(c)) {
        steps.push(Exclusion::SharedBox { cell: c, clue });
    }
    let ortho = p.house_type().flipped();
    let line_cells: Vec<Coord> = if candidate == p.target {
        p.layout.line_cells.to_vec()
    } else {
        vec![p.layout.shared_line_cell]
    };
    for cell in line_cells {
        let line = ortho.line_through(cell);
        let clue = line
            .cells()
            .into_iter()
            .find(|&c| c != cell && p.grid.get(c) == Some(candidate))
            .ok_or_else(|| err("line cell has no candidate instance on its line"))?;
        steps.push(Exclusion::SharedLine { cell, clue });
    }
    Ok(steps)
}

/// Chain-of-thought answer text (without the leading `A: `).
pub fn narrate(p: &HiddenSinglePuzzle, first: Candidate, goal_name: &str) -> Result<String, PromptError> {
    let (c, other) = match first {
        Candidate::TargetFirst => (p.target, p.distractor),
        Candidate::DistractorFirst => (p.distractor, p.target),
    };
    let noun = p.house_type().noun();
    let cross = p.house_type().flipped().noun();
    let steps = narration_steps(p, c)?;
    let name = |x: Coord| if x == p.goal { goal_name.to_string() } else { cell_name(x) };

    let filled: Vec<String> = steps
        .iter()
        .filter_map(|s| match s {
            Exclusion::Filled(x) => Some(name(*x)),
            _ => None,
        })
        .collect();
    let mut boxed = Vec::new();
    let mut box_clue = None;
    let mut lines = Vec::new();
    for s in &steps {
        match *s {
            Exclusion::SharedBox { cell, clue } => {
                boxed.push(name(cell));
                box_clue = Some(clue);
            }
            Exclusion::SharedLine { cell, clue } => lines.push(format!(
                "{} cannot contain {c} because it shares a {cross} with {c} in {}",
                name(cell),
                name(clue)
            )),
            Exclusion::Filled(_) => {}
        }
    }
    let box_clue = box_clue.ok_or_else(|| PromptError::Narration("no box exclusion".into()))?;
    let mut text = format!(
        "To solve for {goal}, we need to find the number that cannot go in any other cell in its {noun}. \
         Between the two numbers that appear 3 times on the grid, {c} and {other}, we arbitrarily choose {c} as a candidate \
         to check whether it can go in the other cells. {c} cannot go in {filled} because these cells already have numbers in them. \
         {boxed} cannot contain {c} because they share a 3x3 box with {c} in {bc}. {lines}.",
        goal = goal_name,
        filled = join_items(&filled, "or"),
        boxed = join_items(&boxed, "and"),
        bc = name(box_clue),
        lines = lines.join(", and "),
    );
    match first {
        Candidate::TargetFirst => text.push_str(&format!(
            " Since we have eliminated all other eight cells in {house} as potential locations to place to put the {c}, \
             we can conclude that {goal} must contain the {c}.",
            house = p.target_house,
            goal = goal_name,
        )),
        Candidate::DistractorFirst => {
            let open = p.layout.target_only_line_cell();
            text.push_str(&format!(
                " However, there are no numbers that prevent either {goal} or {open} from containing {c}, so we cannot be certain about either. \
                 Choosing {other} as the new candidate and applying a similar logic, we can see that the only cell in {house} \
                 that can contain {other} is {goal}, so we can conclude that the answer is {other}.",
                goal = goal_name,
                open = name(open),
                house = p.target_house,
            ))
        }
    }
    Ok(text)
}

fn goal_name(p: &HiddenSinglePuzzle, rep: Representation) -> String {
    match rep {
        Representation::List => cell_name(p.goal),
        Representation::Array => "X".to_string(),
    }
}

/// A solved shot: question plus answer.
pub fn solved_shot(p: &HiddenSinglePuzzle, rep: Representation, cot: Option<Candidate>) -> Result<String, PromptError> {
    let (body, stem) = question_body(p, rep);
    Ok(match cot {
        None => format!("{body}{stem} {}", p.target),
        Some(first) => format!("{body}A: {}", narrate(p, first, &goal_name(p, rep))?),
    })
}

/// Full prompt: optional preamble, the solved shots and the open question,
/// separated by blank lines.
pub fn build_prompt(
    spec: &PromptSpec,
    eval: &HiddenSinglePuzzle,
    shots: &[HiddenSinglePuzzle],
    seed: u64,
) -> Result<String, PromptError> {
    spec.validate()?;
    if shots.len() != spec.shots {
        return Err(PromptError::WrongShotPuzzles { expected: spec.shots, got: shots.len() });
    }
    let styles: Vec<Option<Candidate>> = match spec.cot {
        CotStyle::None => vec![None; spec.shots],
        CotStyle::TargetFirst => vec![Some(Candidate::TargetFirst); spec.shots],
        CotStyle::DistractorFirst => vec![Some(Candidate::DistractorFirst); spec.shots],
        CotStyle::Mixed => {
            let mut v = vec![Some(Candidate::TargetFirst), Some(Candidate::TargetFirst)];
            v.extend([Some(Candidate::DistractorFirst), Some(Candidate::DistractorFirst)]);
            v.shuffle(&mut rng_from(seed));
            v
        }
    };
    let mut blocks = Vec::new();
    if spec.preamble {
        blocks.push(PREAMBLE.to_string());
    }
    for (p, style) in shots.iter().zip(styles) {
        blocks.push(solved_shot(p, spec.representation, style)?);
    }
    let (body, stem) = question_body(eval, spec.representation);
    blocks.push(match spec.cot {
        CotStyle::None => body + &stem,
        _ => body + "A:",
    });
    Ok(blocks.join("\n\n"))
}

fn digit_token() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?:^|[^0-9])([1-9])(?:[^0-9]|$)").expect("valid regex"))
}

fn conclusion() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?:must contain(?: the)?|must be|answer is)\s+([1-9])(?:[^0-9]|$)").expect("valid regex")
    })
}

/// First standalone digit 1..9 in a completion.
pub fn parse_answer(text: &str) -> Option<Digit> {
    digit_token()
        .captures(text)
        .and_then(|c| c[1].parse::<u8>().ok())
        .and_then(|v| Digit::new(v).ok())
}

/// Answer of a chain-of-thought completion: the last stated conclusion, or
/// the first digit if no conclusion phrase appears.
pub fn parse_cot_answer(text: &str) -> Option<Digit> {
    conclusion()
        .captures_iter(text)
        .last()
        .and_then(|c| c[1].parse::<u8>().ok())
        .and_then(|v| Digit::new(v).ok())
        .or_else(|| parse_answer(text))
}

pub fn parse_for(spec: &PromptSpec, text: &str) -> Option<Digit> {
    match spec.cot {
        CotStyle::None => parse_answer(text),
        _ => parse_cot_answer(text),
    }
}

fn hint_line() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\(row ([1-9]), column ([1-9])\) contains ([1-9])").expect("valid regex"))
}

/// Grid described by the hint lines of a list-encoded question.
pub fn parse_list_grid(text: &str) -> Grid {
    let mut g = Grid::empty();
    for c in hint_line().captures_iter(text) {
        let (r, k, d) = (c[1].parse().unwrap_or(0), c[2].parse().unwrap_or(0), c[3].parse().unwrap_or(0));
        if let (Ok(coord), Ok(digit)) = (Coord::new(r, k), Digit::new(d)) {
            g.place(coord, digit);
        }
    }
    g
}
