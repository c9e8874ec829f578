//! Aggregate parameter fitting over response sequences.

use std::path::Path;

use serde::{Deserialize, Serialize};

use hidden_single_core::model::{fit_aggregate, FitConfig};
use hidden_single_core::puzzle::ResponseRole;

use crate::args::SequencePhase;
use crate::commands::{load_participants, sequence};
use crate::error::{CliError, Result};
use crate::files::{write_json, Meta};
use crate::params::ParamsFile;
use crate::Ctx;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutput {
    #[serde(flatten)]
    pub file: ParamsFile,
    pub final_loss: f64,
    pub participants: usize,
    pub trials: usize,
    pub dropped: Vec<String>,
    pub config: FitConfig,
}

/// Sequences of the most common length; the sessions dropped for a
/// different length are returned by name.
pub fn equal_length(seqs: Vec<(String, Vec<ResponseRole>)>) -> (Vec<Vec<ResponseRole>>, Vec<String>) {
    let mut lengths: Vec<usize> = seqs.iter().map(|(_, s)| s.len()).collect();
    lengths.sort_unstable();
    let mode = lengths
        .chunk_by(|a, b| a == b)
        .max_by_key(|run| (run.len(), run[0]))
        .map(|run| run[0])
        .unwrap_or(0);
    let (keep, drop): (Vec<_>, Vec<_>) = seqs.into_iter().partition(|(_, s)| s.len() == mode && mode > 0);
    (keep.into_iter().map(|(_, s)| s).collect(), drop.into_iter().map(|(id, _)| id).collect())
}

pub fn run(
    ctx: &Ctx,
    input: &Path,
    phase: SequencePhase,
    steps: Option<usize>,
    learning_rate: Option<f64>,
) -> Result<()> {
    let (_, participants) = load_participants(input)?;
    let seqs = participants.iter().map(|p| (p.session.clone(), sequence(p, phase))).collect();
    let (data, dropped) = equal_length(seqs);
    if !dropped.is_empty() {
        ctx.note(&format!("dropped {} participant(s) with a different number of trials", dropped.len()));
    }
    if data.is_empty() {
        return Err(CliError::Validation(format!("{}: no complete response sequences", input.display())));
    }
    let seed = ctx.seed();
    let mut config = ctx.config.fit.apply(FitConfig::default());
    config.steps = steps.unwrap_or(config.steps);
    config.learning_rate = learning_rate.unwrap_or(config.learning_rate);
    config.seed = seed;
    let report = fit_aggregate(&data, &config).map_err(|e| CliError::Validation(e.to_string()))?;
    let meta = Meta::new("fit", Some(seed))
        .with("input", input.display().to_string())
        .with("phase", format!("{phase:?}").to_lowercase());
    let out = FitOutput {
        file: ParamsFile { meta: Some(meta), params: report.params.to_record() },
        final_loss: report.final_loss,
        participants: report.participants,
        trials: report.trials,
        dropped,
        config: report.config,
    };
    write_json(ctx.out(), &out)?;
    ctx.note(&format!("fit {} participants x {} trials, loss {:.6}", out.participants, out.trials, out.final_loss));
    Ok(())
}
