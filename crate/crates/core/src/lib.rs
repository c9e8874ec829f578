//! Core library for the hidden-single Sudoku study: grids, puzzle generation,
//! experiment schedules, feedback, simulated agents, the strategy model and
//! its analyses, language-model prompting and the session protocol.

pub mod grid;
pub mod puzzle;
pub mod rng;
pub mod schedule;
pub mod feedback;
pub mod model;
pub mod agents;
pub mod analysis;
pub mod prompts;
pub mod protocol;
pub mod export;
