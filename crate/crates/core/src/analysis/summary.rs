//! Accuracy and response time by condition flag and trial set, with
//! percentile bootstrap intervals.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::puzzle::ConditionCombo;
use crate::rng::child_rng;
use crate::schedule::SET_SIZE;

pub const BOOTSTRAP_RESAMPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestTrial {
    pub participant: String,
    /// 1-based index within the test phase.
    pub trial: usize,
    pub condition: ConditionCombo,
    pub correct: bool,
    pub rt_ms: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    DigitSet,
    HouseType,
    GoalPosition,
}

impl Factor {
    pub const ALL: [Factor; 3] = [Factor::DigitSet, Factor::HouseType, Factor::GoalPosition];

    pub fn changed(self, c: ConditionCombo) -> bool {
        match self {
            Factor::DigitSet => c.ds_changed,
            Factor::HouseType => c.ht_changed,
            Factor::GoalPosition => c.goal_position_changed(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Factor::DigitSet => "ds",
            Factor::HouseType => "ht",
            Factor::GoalPosition => "goal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub factor: Factor,
    pub changed: bool,
    /// 1-based set of eight trials.
    pub set: usize,
    pub n: usize,
    pub accuracy: Option<f64>,
    pub accuracy_lo: Option<f64>,
    pub accuracy_hi: Option<f64>,
    /// Correct trials with a recorded response time.
    pub rt_n: usize,
    pub mean_log2_rt: Option<f64>,
    pub rt_lo: Option<f64>,
    pub rt_hi: Option<f64>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// 95% percentile interval of the resampled mean.
fn bootstrap(v: &[f64], rng: &mut impl Rng) -> Option<(f64, f64)> {
    if v.is_empty() {
        return None;
    }
    let mut means: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| (0..v.len()).map(|_| v[rng.gen_range(0..v.len())]).sum::<f64>() / v.len() as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let q = |p: f64| means[((p * (means.len() - 1) as f64).round()) as usize];
    Some((q(0.025), q(0.975)))
}

pub fn condition_summary(trials: &[TestTrial], seed: u64) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for factor in Factor::ALL {
        for changed in [false, true] {
            for set in 1..=SET_SIZE {
                let sel: Vec<&TestTrial> = trials
                    .iter()
                    .filter(|t| factor.changed(t.condition) == changed && (t.trial - 1) / SET_SIZE + 1 == set)
                    .collect();
                let acc: Vec<f64> = sel.iter().map(|t| t.correct as u8 as f64).collect();
                let rts: Vec<f64> = sel
                    .iter()
                    .filter(|t| t.correct)
                    .filter_map(|t| t.rt_ms)
                    .map(|ms| (ms.max(1) as f64 / 1000.0).log2())
                    .collect();
                let mut rng = child_rng(seed, "bootstrap", cell);
                cell += 1;
                let acc_ci = bootstrap(&acc, &mut rng);
                let rt_ci = bootstrap(&rts, &mut rng);
                rows.push(SummaryRow {
                    factor,
                    changed,
                    set,
                    n: acc.len(),
                    accuracy: mean(&acc),
                    accuracy_lo: acc_ci.map(|c| c.0),
                    accuracy_hi: acc_ci.map(|c| c.1),
                    rt_n: rts.len(),
                    mean_log2_rt: mean(&rts),
                    rt_lo: rt_ci.map(|c| c.0),
                    rt_hi: rt_ci.map(|c| c.1),
                });
            }
        }
    }
    rows
}
