//! Cross-entropy fit of the aggregate model with Adam.
//!
//! Every free row segment (the whole of `a`, the upper part of each `X` row,
//! the lower part of each `W` row) is the softmax of its own logits, so
//! structural zeros stay exactly zero and rows stay stochastic.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{emission_matrix, AggregateParams, Mat4, Vec4};
use crate::puzzle::ResponseRole;
use crate::rng::rng_from;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("sequence {index} has {len} trials, expected {expected}")]
    Ragged { index: usize, len: usize, expected: usize },
    #[error("loss became {loss} at step {step}")]
    NonFiniteLoss { step: usize, loss: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub learning_rate: f64,
    pub steps: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Half-width of the uniform logit initialization.
    pub init_scale: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            learning_rate: 0.05,
            steps: 5000,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            init_scale: 0.01,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub params: AggregateParams,
    /// Mean cross-entropy per response at the returned parameters.
    pub final_loss: f64,
    /// Mean loss before each update.
    pub loss_trace: Vec<f64>,
    pub config: FitConfig,
    pub participants: usize,
    pub trials: usize,
}

/// (matrix, row, first column, width) of each softmax segment; `a` is row 0 of
/// pseudo-matrix 0.
const SEGMENTS: [(u8, usize, usize, usize); 7] = [
    (0, 0, 0, 4),
    (1, 0, 0, 4),
    (1, 1, 1, 3),
    (1, 2, 2, 2),
    (2, 1, 0, 2),
    (2, 2, 0, 3),
    (2, 3, 0, 4),
];

pub const LOGIT_COUNT: usize = 22;

/// Unconstrained parameters of the fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Logits(pub Vec<f64>);

fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

impl Logits {
    pub fn random(rng: &mut impl Rng, scale: f64) -> Self {
        Logits((0..LOGIT_COUNT).map(|_| rng.gen_range(-scale..=scale)).collect())
    }

    pub fn to_params(&self) -> AggregateParams {
        let mut a = [0.0; 4];
        let mut x: Mat4 = [[0.0; 4]; 4];
        let mut w: Mat4 = [[0.0; 4]; 4];
        x[3][3] = 1.0;
        w[0][0] = 1.0;
        let mut k = 0;
        for (m, row, col, width) in SEGMENTS {
            let s = softmax(&self.0[k..k + width]);
            k += width;
            let dst: &mut [f64] = match m {
                0 => &mut a[col..col + width],
                1 => &mut x[row][col..col + width],
                _ => &mut w[row][col..col + width],
            };
            dst.copy_from_slice(&s);
        }
        AggregateParams { a, x, w }
    }
}

/// Response-role counts per trial.
fn tally(data: &[Vec<ResponseRole>]) -> Result<Vec<Vec4>, FitError> {
    let first = data.first().ok_or(FitError::EmptyDataset)?;
    let t = first.len();
    if t == 0 {
        return Err(FitError::EmptyDataset);
    }
    let mut counts = vec![[0.0; 4]; t];
    for (i, seq) in data.iter().enumerate() {
        if seq.len() != t {
            return Err(FitError::Ragged { index: i, len: seq.len(), expected: t });
        }
        for (k, r) in seq.iter().enumerate() {
            counts[k][r.index()] += 1.0;
        }
    }
    Ok(counts)
}

/// Mean cross-entropy per response and its gradient with respect to the logits.
pub fn loss_and_gradient(logits: &Logits, counts: &[Vec4]) -> (f64, Vec<f64>) {
    let p = logits.to_params();
    let r = emission_matrix();
    let t_max = counts.len();
    let total: f64 = counts.iter().flatten().sum();

    let mut us = Vec::with_capacity(t_max);
    let mut u = p.a;
    for _ in 0..t_max {
        us.push(u);
        u = super::vec_mat(&u, &p.x);
    }

    let mut loss = 0.0;
    let mut g_a = [0.0; 4];
    let mut g_x = [[0.0; 4]; 4];
    let mut g_w = [[0.0; 4]; 4];
    let mut g_next = [0.0; 4];
    for t in (0..t_max).rev() {
        let v = super::vec_mat(&us[t], &p.w);
        let q = super::vec_mat(&v, &r);
        let mut g_q = [0.0; 4];
        for k in 0..4 {
            if counts[t][k] > 0.0 {
                let qk = q[k].max(1e-300);
                loss -= counts[t][k] * qk.ln();
                g_q[k] = -counts[t][k] / qk / total;
            }
        }
        let mut g_v = [0.0; 4];
        for i in 0..4 {
            g_v[i] = (0..4).map(|k| g_q[k] * r[i][k]).sum();
        }
        let mut g_u = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                g_w[i][j] += us[t][i] * g_v[j];
                g_u[i] += p.w[i][j] * g_v[j] + p.x[i][j] * g_next[j];
            }
        }
        if t > 0 {
            for i in 0..4 {
                for j in 0..4 {
                    g_x[i][j] += us[t - 1][i] * g_u[j];
                }
            }
        } else {
            g_a = g_u;
        }
        g_next = g_u;
    }

    let mut grad = Vec::with_capacity(LOGIT_COUNT);
    let mut k = 0;
    for (m, row, col, width) in SEGMENTS {
        let s = softmax(&logits.0[k..k + width]);
        k += width;
        let g: &[f64] = match m {
            0 => &g_a[col..col + width],
            1 => &g_x[row][col..col + width],
            _ => &g_w[row][col..col + width],
        };
        let dot: f64 = s.iter().zip(g).map(|(a, b)| a * b).sum();
        grad.extend(s.iter().zip(g).map(|(si, gi)| si * (gi - dot)));
    }
    (loss / total, grad)
}

pub fn fit_aggregate(data: &[Vec<ResponseRole>], config: &FitConfig) -> Result<FitReport, FitError> {
    let counts = tally(data)?;
    let mut rng = rng_from(config.seed);
    let mut theta = Logits::random(&mut rng, config.init_scale);
    let mut m = [0.0; LOGIT_COUNT];
    let mut v = [0.0; LOGIT_COUNT];
    let mut trace = Vec::with_capacity(config.steps);
    for step in 1..=config.steps {
        let (loss, g) = loss_and_gradient(&theta, &counts);
        if !loss.is_finite() || g.iter().any(|x| !x.is_finite()) {
            return Err(FitError::NonFiniteLoss { step, loss });
        }
        trace.push(loss);
        let c1 = 1.0 - config.beta1.powi(step as i32);
        let c2 = 1.0 - config.beta2.powi(step as i32);
        for i in 0..LOGIT_COUNT {
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
            theta.0[i] -= config.learning_rate * (m[i] / c1) / ((v[i] / c2).sqrt() + config.epsilon);
        }
    }
    let (final_loss, _) = loss_and_gradient(&theta, &counts);
    Ok(FitReport {
        params: theta.to_params(),
        final_loss,
        loss_trace: trace,
        config: *config,
        participants: data.len(),
        trials: counts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::forward_response_dist;

    fn relative_error(a: &[f64], b: &[f64]) -> f64 {
        let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        diff / na.max(nb).max(1e-300)
    }

    #[test]
    fn logits_give_valid_params() {
        let mut rng = rng_from(3);
        for _ in 0..20 {
            Logits::random(&mut rng, 3.0).to_params().validate().unwrap();
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rng_from(8);
        for _ in 0..5 {
            let theta = Logits::random(&mut rng, 1.5);
            let counts: Vec<Vec4> =
                (0..12).map(|_| [0; 4].map(|_: i32| rng.gen_range(0..20) as f64)).collect();
            let (_, g) = loss_and_gradient(&theta, &counts);
            let h = 1e-5;
            let fd: Vec<f64> = (0..LOGIT_COUNT)
                .map(|i| {
                    let mut up = theta.clone();
                    up.0[i] += h;
                    let mut dn = theta.clone();
                    dn.0[i] -= h;
                    (loss_and_gradient(&up, &counts).0 - loss_and_gradient(&dn, &counts).0) / (2.0 * h)
                })
                .collect();
            assert!(relative_error(&g, &fd) < 1e-4, "{}", relative_error(&g, &fd));
        }
    }

    #[test]
    fn all_target_data() {
        let data = vec![vec![ResponseRole::Target; 10]; 30];
        let cfg = FitConfig { steps: 1500, ..FitConfig::default() };
        let report = fit_aggregate(&data, &cfg).unwrap();
        for t in 1..=10 {
            assert!(forward_response_dist(&report.params, t)[3] >= 0.99);
        }
    }

    #[test]
    fn dataset_errors() {
        assert_eq!(fit_aggregate(&[], &FitConfig::default()).unwrap_err(), FitError::EmptyDataset);
        let ragged = vec![vec![ResponseRole::Target; 3], vec![ResponseRole::Target; 2]];
        assert!(matches!(fit_aggregate(&ragged, &FitConfig::default()), Err(FitError::Ragged { .. })));
    }
}
