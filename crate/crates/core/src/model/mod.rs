//! Strategy model: four ordered strategy classes, a fixed emission matrix over
//! response roles, and aggregate parameters (initial distribution `a`,
//! monotone transitions `X`, error fallback `W`).

mod fit;
mod forward;
mod paths;

pub use fit::{fit_aggregate, loss_and_gradient, FitConfig, FitError, FitReport, Logits, LOGIT_COUNT};
pub use forward::{forward_all, forward_response_dist};
pub use paths::{
    enumerate_paths, path_count, path_likelihood, path_posterior, path_prior, transition_trial,
    PathPosterior, PosteriorError, StrategyPath,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec4 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];

pub const FORMAT_VERSION: u32 = 1;
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StrategyClass {
    #[serde(rename = "UG")]
    UniformGuess,
    #[serde(rename = "ADC")]
    AvoidDirectConstraints,
    #[serde(rename = "PD")]
    PrevalentDigits,
    #[serde(rename = "S")]
    Successful,
}

impl StrategyClass {
    pub const ALL: [StrategyClass; 4] = [
        StrategyClass::UniformGuess,
        StrategyClass::AvoidDirectConstraints,
        StrategyClass::PrevalentDigits,
        StrategyClass::Successful,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn abbrev(self) -> &'static str {
        ["UG", "ADC", "PD", "S"][self.index()]
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.abbrev().eq_ignore_ascii_case(s))
    }
}

/// Response probabilities of each strategy over (in-house, absent,
/// distractor, target).
pub fn emission_matrix() -> Mat4 {
    [
        [3.0 / 9.0, 4.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0],
        [0.0, 4.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0],
        [0.0, 0.0, 0.5, 0.5],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

pub fn vec_mat(v: &Vec4, m: &Mat4) -> Vec4 {
    let mut out = [0.0; 4];
    for (i, &vi) in v.iter().enumerate() {
        for j in 0..4 {
            out[j] += vi * m[i][j];
        }
    }
    out
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        out[i] = vec_mat(&a[i], b);
    }
    out
}

pub fn identity() -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("{0} has a negative or non-finite entry")]
    BadEntry(&'static str),
    #[error("{what} row {row} sums to {sum}")]
    NotStochastic { what: &'static str, row: usize, sum: f64 },
    #[error("{what}[{row}][{col}] must be zero")]
    StructuralZero { what: &'static str, row: usize, col: usize },
    #[error("X[S][S] must be 1")]
    SuccessNotAbsorbing,
    #[error("unsupported format version {0}")]
    Version(u32),
}

/// Aggregate model parameters. `R` is fixed and not stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateParams {
    pub a: Vec4,
    pub x: Mat4,
    pub w: Mat4,
}

fn check_row(what: &'static str, row: usize, v: &Vec4) -> Result<(), ParamsError> {
    if v.iter().any(|&e| !e.is_finite() || e < 0.0) {
        return Err(ParamsError::BadEntry(what));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > TOL {
        return Err(ParamsError::NotStochastic { what, row, sum });
    }
    Ok(())
}

impl AggregateParams {
    pub fn new(a: Vec4, x: Mat4, w: Mat4) -> Result<Self, ParamsError> {
        let p = AggregateParams { a, x, w };
        p.validate()?;
        Ok(p)
    }

    /// Rescales each row to sum to one, then validates.
    pub fn normalized(a: Vec4, x: Mat4, w: Mat4) -> Result<Self, ParamsError> {
        fn norm(v: Vec4) -> Vec4 {
            let s: f64 = v.iter().sum();
            if s > 0.0 {
                v.map(|e| e / s)
            } else {
                v
            }
        }
        AggregateParams::new(norm(a), x.map(norm), w.map(norm))
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        check_row("a", 0, &self.a)?;
        for i in 0..4 {
            check_row("X", i, &self.x[i])?;
            check_row("W", i, &self.w[i])?;
            for j in 0..4 {
                if j < i && self.x[i][j] != 0.0 {
                    return Err(ParamsError::StructuralZero { what: "X", row: i, col: j });
                }
                if j > i && self.w[i][j] != 0.0 {
                    return Err(ParamsError::StructuralZero { what: "W", row: i, col: j });
                }
            }
        }
        if self.x[3][3] != 1.0 {
            return Err(ParamsError::SuccessNotAbsorbing);
        }
        Ok(())
    }

    /// Effective per-strategy response distribution `W·R`.
    pub fn effective_emission(&self) -> Mat4 {
        mat_mul(&self.w, &emission_matrix())
    }

    /// A fixed strategy with no transitions and no errors.
    pub fn pure(s: StrategyClass) -> Self {
        let mut a = [0.0; 4];
        a[s.index()] = 1.0;
        AggregateParams { a, x: identity(), w: identity() }
    }

    pub fn to_record(&self) -> ParamsRecord {
        ParamsRecord {
            format_version: FORMAT_VERSION,
            a: self.a.to_vec(),
            x: self.x.iter().flatten().copied().collect(),
            w: self.w.iter().flatten().copied().collect(),
        }
    }

    pub fn from_record(r: &ParamsRecord) -> Result<Self, ParamsError> {
        if r.format_version != FORMAT_VERSION {
            return Err(ParamsError::Version(r.format_version));
        }
        let bad = |what| ParamsError::BadEntry(what);
        let a: Vec4 = r.a.clone().try_into().map_err(|_| bad("a"))?;
        let mat = |v: &[f64], what| -> Result<Mat4, ParamsError> {
            if v.len() != 16 {
                return Err(bad(what));
            }
            let mut m = [[0.0; 4]; 4];
            for (k, &e) in v.iter().enumerate() {
                m[k / 4][k % 4] = e;
            }
            Ok(m)
        };
        AggregateParams::new(a, mat(&r.x, "X")?, mat(&r.w, "W")?)
    }
}

impl Serialize for AggregateParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for AggregateParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ParamsRecord::deserialize(d)?;
        AggregateParams::from_record(&r).map_err(serde::de::Error::custom)
    }
}

/// Flat serialized parameters, matrices in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub format_version: u32,
    pub a: Vec<f64>,
    #[serde(rename = "X")]
    pub x: Vec<f64>,
    #[serde(rename = "W")]
    pub w: Vec<f64>,
}

/// Published fit for participants classified as solvers. The printed values
/// are rounded, so rows are rescaled to sum to one.
pub fn solver_params() -> AggregateParams {
    AggregateParams::normalized(
        [0.085, 0.241, 0.310, 0.365],
        [
            [0.0, 0.999, 0.0, 0.0],
            [0.0, 0.106, 0.892, 0.001],
            [0.0, 0.0, 0.783, 0.217],
            [0.0, 0.0, 0.0, 1.0],
        ],
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.054, 0.946, 0.0],
            [0.0, 0.0, 0.090, 0.910],
        ],
    )
    .expect("fixture is valid")
}

/// Published fit for non-solvers, rows rescaled like [`solver_params`].
pub fn non_solver_params() -> AggregateParams {
    AggregateParams::normalized(
        [0.109, 0.397, 0.463, 0.032],
        [
            [0.560, 0.001, 0.437, 0.002],
            [0.0, 0.770, 0.229, 0.001],
            [0.0, 0.0, 0.993, 0.007],
            [0.0, 0.0, 0.0, 1.0],
        ],
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.109, 0.891, 0.0, 0.0],
            [0.024, 0.038, 0.939, 0.0],
            [0.016, 0.016, 0.185, 0.783],
        ],
    )
    .expect("fixture is valid")
}

/// The `W·R` matrices as printed alongside the published fits (3 decimals).
pub const SOLVER_WR_PRINTED: Mat4 = [
    [0.333, 0.444, 0.111, 0.111],
    [0.000, 0.667, 0.167, 0.167],
    [0.000, 0.036, 0.482, 0.482],
    [0.000, 0.000, 0.045, 0.955],
];

pub const NON_SOLVER_WR_PRINTED: Mat4 = [
    [0.333, 0.444, 0.111, 0.111],
    [0.036, 0.642, 0.161, 0.161],
    [0.008, 0.036, 0.478, 0.478],
    [0.005, 0.018, 0.097, 0.880],
];
