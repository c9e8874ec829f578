//! Simulated participants. Each agent follows a monotone strategy path drawn
//! from `a` and `X`, falls back to a weaker strategy through `W` on each
//! trial, and answers with a response role drawn from `R`.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Digit;
use crate::model::{emission_matrix, AggregateParams, StrategyClass, StrategyPath, Vec4};
use crate::puzzle::{HiddenSinglePuzzle, ResponseRole};
use crate::rng::child_rng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AgentError {
    #[error("cohort size must be at least 1")]
    EmptyCohort,
}

/// Index drawn from a probability vector.
pub fn sample_index(p: &Vec4, rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    // rounding left a sliver above the last cumulative sum
    p.iter().rposition(|&x| x > 0.0).unwrap_or(3)
}

pub fn simulate_participant(
    p: &AggregateParams,
    trials: usize,
    rng: &mut impl Rng,
) -> (StrategyPath, Vec<ResponseRole>) {
    let r = emission_matrix();
    let mut path = Vec::with_capacity(trials);
    let mut responses = Vec::with_capacity(trials);
    let mut s = sample_index(&p.a, rng);
    for t in 0..trials {
        if t > 0 {
            s = sample_index(&p.x[s], rng);
        }
        let effective = sample_index(&p.w[s], rng);
        let role = sample_index(&r[effective], rng);
        path.push(StrategyClass::ALL[s]);
        responses.push(ResponseRole::ALL[role]);
    }
    (StrategyPath::new(path).expect("X is upper triangular"), responses)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticParticipant {
    pub id: usize,
    pub path: StrategyPath,
    pub responses: Vec<ResponseRole>,
}

/// `n` independent agents; agent `i` draws from its own child stream, so the
/// result does not depend on thread scheduling.
pub fn simulate_cohort(
    n: usize,
    p: &AggregateParams,
    trials: usize,
    seed: u64,
) -> Result<Vec<SyntheticParticipant>, AgentError> {
    if n == 0 {
        return Err(AgentError::EmptyCohort);
    }
    Ok((0..n)
        .into_par_iter()
        .map(|id| {
            let mut rng = child_rng(seed, "agent", id as u64);
            let (path, responses) = simulate_participant(p, trials, &mut rng);
            SyntheticParticipant { id, path, responses }
        })
        .collect())
}

/// A concrete digit with the given role, chosen uniformly.
pub fn response_digit(p: &HiddenSinglePuzzle, role: ResponseRole, rng: &mut impl Rng) -> Digit {
    *p.digits_with_role(role).choose(rng).expect("every role has a digit")
}
