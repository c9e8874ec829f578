//! Exact posterior over monotone strategy paths.
//!
//! A non-decreasing path over four classes is fully described by how many
//! trials it spends in each class, so there are C(T+3, 3) of them. Segment
//! log-likelihoods come from per-class prefix sums, which makes each path
//! O(1) to score.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AggregateParams, StrategyClass, Vec4};
use crate::puzzle::ResponseRole;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PosteriorError {
    #[error("no responses")]
    Empty,
    #[error("path has {path} trials but there are {responses} responses")]
    LengthMismatch { path: usize, responses: usize },
    #[error("every strategy path has zero probability")]
    ZeroProbability,
    #[error("path is not non-decreasing")]
    NotMonotone,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrategyPath(Vec<StrategyClass>);

impl StrategyPath {
    pub fn new(classes: Vec<StrategyClass>) -> Result<Self, PosteriorError> {
        if classes.windows(2).any(|w| w[1] < w[0]) {
            return Err(PosteriorError::NotMonotone);
        }
        Ok(StrategyPath(classes))
    }

    pub fn from_segments(n: [usize; 4]) -> Self {
        StrategyPath(
            StrategyClass::ALL
                .iter()
                .zip(n)
                .flat_map(|(&s, k)| std::iter::repeat_n(s, k))
                .collect(),
        )
    }

    pub fn classes(&self) -> &[StrategyClass] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn segments(&self) -> [usize; 4] {
        let mut n = [0; 4];
        self.0.iter().for_each(|s| n[s.index()] += 1);
        n
    }

    /// Compact form such as `UG UG PD S`.
    pub fn label(&self) -> String {
        self.0.iter().map(|s| s.abbrev()).collect::<Vec<_>>().join(" ")
    }
}

pub fn path_count(t: usize) -> usize {
    (t + 1) * (t + 2) * (t + 3) / 6
}

/// Segment lengths of every monotone path in lexicographic order
/// (UG < ADC < PD < S, earlier trials first).
fn all_segments(t: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(path_count(t));
    for n0 in (0..=t).rev() {
        for n1 in (0..=t - n0).rev() {
            for n2 in (0..=t - n0 - n1).rev() {
                out.push([n0, n1, n2, t - n0 - n1 - n2]);
            }
        }
    }
    out
}

pub fn enumerate_paths(t: usize) -> Vec<StrategyPath> {
    all_segments(t).into_iter().map(StrategyPath::from_segments).collect()
}

pub fn path_prior(p: &AggregateParams, path: &StrategyPath) -> f64 {
    let c = path.classes();
    let Some(first) = c.first() else { return 1.0 };
    c.windows(2).fold(p.a[first.index()], |acc, w| acc * p.x[w[0].index()][w[1].index()])
}

pub fn path_likelihood(
    responses: &[ResponseRole],
    path: &StrategyPath,
    p: &AggregateParams,
) -> Result<f64, PosteriorError> {
    if responses.len() != path.len() {
        return Err(PosteriorError::LengthMismatch { path: path.len(), responses: responses.len() });
    }
    let e = p.effective_emission();
    Ok(path
        .classes()
        .iter()
        .zip(responses)
        .map(|(s, r)| e[s.index()][r.index()])
        .product())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathPosterior {
    segments: Vec<[usize; 4]>,
    weights: Vec<f64>,
    marginals: Vec<Vec4>,
    log_evidence: f64,
}

impl PathPosterior {
    pub fn trials(&self) -> usize {
        self.marginals.len()
    }

    /// Posterior weight of every path, in enumeration order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn paths(&self) -> impl Iterator<Item = (StrategyPath, f64)> + '_ {
        self.segments.iter().zip(&self.weights).map(|(s, &w)| (StrategyPath::from_segments(*s), w))
    }

    /// `M[t][s]`: posterior probability of class `s` at trial `t + 1`.
    pub fn marginals(&self) -> &[Vec4] {
        &self.marginals
    }

    /// `P(s_t >= s)` per trial.
    pub fn cumulative(&self) -> Vec<Vec4> {
        self.marginals
            .iter()
            .map(|m| {
                let mut c = [0.0; 4];
                let mut acc = 0.0;
                for s in (0..4).rev() {
                    acc += m[s];
                    c[s] = acc;
                }
                c
            })
            .collect()
    }

    pub fn log_evidence(&self) -> f64 {
        self.log_evidence
    }

    /// The `k` most probable paths; ties keep lexicographic order.
    pub fn top_paths(&self, k: usize) -> Vec<(StrategyPath, f64)> {
        let mut idx: Vec<usize> = (0..self.weights.len()).collect();
        idx.sort_by(|&i, &j| self.weights[j].total_cmp(&self.weights[i]));
        idx.into_iter()
            .take(k)
            .map(|i| (StrategyPath::from_segments(self.segments[i]), self.weights[i]))
            .collect()
    }
}

pub fn path_posterior(responses: &[ResponseRole], p: &AggregateParams) -> Result<PathPosterior, PosteriorError> {
    let t = responses.len();
    if t == 0 {
        return Err(PosteriorError::Empty);
    }
    let e = p.effective_emission();
    // finite log sums and counts of impossible emissions, per class
    let mut logsum = vec![[0.0f64; 4]; t + 1];
    let mut zeros = vec![[0usize; 4]; t + 1];
    for (k, r) in responses.iter().enumerate() {
        for s in 0..4 {
            let pr = e[s][r.index()];
            logsum[k + 1][s] = logsum[k][s] + if pr > 0.0 { pr.ln() } else { 0.0 };
            zeros[k + 1][s] = zeros[k][s] + (pr <= 0.0) as usize;
        }
    }
    let ln = |x: f64| if x > 0.0 { x.ln() } else { f64::NEG_INFINITY };
    let segments = all_segments(t);
    let mut logs = Vec::with_capacity(segments.len());
    for n in &segments {
        let mut lp = 0.0;
        let mut start = 0;
        let mut prev: Option<usize> = None;
        for s in 0..4 {
            if n[s] == 0 {
                continue;
            }
            let end = start + n[s];
            lp += match prev {
                None => ln(p.a[s]),
                Some(q) => ln(p.x[q][s]),
            };
            if n[s] > 1 {
                lp += (n[s] - 1) as f64 * ln(p.x[s][s]);
            }
            if zeros[end][s] > zeros[start][s] {
                lp = f64::NEG_INFINITY;
            } else {
                lp += logsum[end][s] - logsum[start][s];
            }
            prev = Some(s);
            start = end;
        }
        logs.push(lp);
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(PosteriorError::ZeroProbability);
    }
    let mut weights: Vec<f64> = logs.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);

    let mut diff = vec![[0.0f64; 4]; t + 1];
    for (n, &w) in segments.iter().zip(&weights) {
        let mut start = 0;
        for s in 0..4 {
            diff[start][s] += w;
            start += n[s];
            diff[start][s] -= w;
        }
    }
    let mut marginals = Vec::with_capacity(t);
    let mut run = [0.0; 4];
    for row in diff.iter().take(t) {
        for s in 0..4 {
            run[s] += row[s];
        }
        marginals.push(run.map(|v: f64| v.max(0.0)));
    }
    Ok(PathPosterior { segments, weights, marginals, log_evidence: max + total.ln() })
}

/// First 1-based trial where `P(s_t >= s)` exceeds one half.
pub fn transition_trial(post: &PathPosterior, s: StrategyClass) -> Option<usize> {
    post.cumulative().iter().position(|c| c[s.index()] > 0.5).map(|i| i + 1)
}
