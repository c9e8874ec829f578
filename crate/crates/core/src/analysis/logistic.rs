//! Per-participant logistic regression of correctness on log2(trial), with a
//! small ridge penalty so perfectly separable records still give finite
//! coefficients.

use serde::{Deserialize, Serialize};

use super::AnalysisError;

pub const RIDGE: f64 = 1e-3;
const MAX_ITER: usize = 100;
const GRAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub intercept: f64,
    pub slope: f64,
    pub converged: bool,
    pub iterations: usize,
    pub penalty: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl LogisticFit {
    /// Predicted probability of a correct response at 1-based trial `t`.
    pub fn predict(&self, t: usize) -> f64 {
        sigmoid(self.intercept + self.slope * (t as f64).log2())
    }
}

/// Penalized negative log-likelihood at (b0, b1).
pub fn penalized_loss(records: &[(usize, bool)], b0: f64, b1: f64, lambda: f64) -> f64 {
    let nll: f64 = records
        .iter()
        .map(|&(t, y)| {
            let z = b0 + b1 * (t as f64).log2();
            softplus(z) - if y { z } else { 0.0 }
        })
        .sum();
    nll + 0.5 * lambda * (b0 * b0 + b1 * b1)
}

/// Fits `P(correct) = sigmoid(b0 + b1 log2 t)` to (1-based trial, correct) pairs.
pub fn fit_logistic(records: &[(usize, bool)]) -> Result<LogisticFit, AnalysisError> {
    fit_logistic_with(records, RIDGE)
}

pub fn fit_logistic_with(records: &[(usize, bool)], lambda: f64) -> Result<LogisticFit, AnalysisError> {
    if records.len() < 2 {
        return Err(AnalysisError::InsufficientData { needed: 2, got: records.len() });
    }
    if records.iter().any(|&(t, _)| t == 0) {
        return Err(AnalysisError::BadTrialIndex);
    }
    let (mut b0, mut b1) = (0.0f64, 0.0f64);
    let mut loss = penalized_loss(records, b0, b1, lambda);
    for it in 0..MAX_ITER {
        let (mut g0, mut g1) = (lambda * b0, lambda * b1);
        let (mut h00, mut h01, mut h11) = (lambda, 0.0, lambda);
        for &(t, y) in records {
            let x = (t as f64).log2();
            let p = sigmoid(b0 + b1 * x);
            let r = p - if y { 1.0 } else { 0.0 };
            g0 += r;
            g1 += r * x;
            let w = p * (1.0 - p);
            h00 += w;
            h01 += w * x;
            h11 += w * x * x;
        }
        if (g0 * g0 + g1 * g1).sqrt() < GRAD_TOL {
            return Ok(LogisticFit { intercept: b0, slope: b1, converged: true, iterations: it, penalty: lambda });
        }
        let det = h00 * h11 - h01 * h01;
        let d0 = (h11 * g0 - h01 * g1) / det;
        let d1 = (h00 * g1 - h01 * g0) / det;
        let mut step = 1.0;
        loop {
            let (n0, n1) = (b0 - step * d0, b1 - step * d1);
            let candidate = penalized_loss(records, n0, n1, lambda);
            if candidate <= loss || step < 1e-10 {
                b0 = n0;
                b1 = n1;
                loss = candidate;
                break;
            }
            step *= 0.5;
        }
    }
    Ok(LogisticFit { intercept: b0, slope: b1, converged: false, iterations: MAX_ITER, penalty: lambda })
}

/// Records for consecutive trials starting at trial 1.
pub fn indexed(correct: &[bool]) -> Vec<(usize, bool)> {
    correct.iter().enumerate().map(|(i, &c)| (i + 1, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;
    use rand::Rng;

    #[test]
    fn all_correct_is_finite_and_high() {
        let f = fit_logistic(&indexed(&[true; 25])).unwrap();
        assert!(f.intercept.is_finite() && f.slope.is_finite());
        assert!(f.predict(25) > 0.8);
        assert!(f.converged);
    }

    #[test]
    fn alternating_is_near_half() {
        let rec: Vec<bool> = (0..25).map(|i| i % 2 == 0).collect();
        let f = fit_logistic(&indexed(&rec)).unwrap();
        assert!((f.predict(25) - 0.5).abs() <= 0.1, "{}", f.predict(25));
    }

    #[test]
    fn loss_not_worse_than_zero() {
        let mut rng = rng_from(4);
        for _ in 0..200 {
            let rec: Vec<bool> = (0..30).map(|_| rng.gen_bool(0.7)).collect();
            let r = indexed(&rec);
            let f = fit_logistic(&r).unwrap();
            assert!(penalized_loss(&r, f.intercept, f.slope, RIDGE) <= penalized_loss(&r, 0.0, 0.0, RIDGE) + 1e-12);
        }
    }

    #[test]
    fn matches_brute_force_minimum() {
        let rec: Vec<bool> = (0..20).map(|i| i > 6 && i != 11).collect();
        let r = indexed(&rec);
        let f = fit_logistic(&r).unwrap();
        let best = penalized_loss(&r, f.intercept, f.slope, RIDGE);
        for d0 in [-0.01, 0.0, 0.01] {
            for d1 in [-0.01, 0.0, 0.01] {
                assert!(penalized_loss(&r, f.intercept + d0, f.slope + d1, RIDGE) >= best - 1e-12);
            }
        }
    }

    #[test]
    fn too_few_records() {
        assert!(fit_logistic(&[(1, true)]).is_err());
    }
}
