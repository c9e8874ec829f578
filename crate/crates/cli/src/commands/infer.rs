//! Per-participant posterior over strategy paths. Writes `marginals` (one
//! row per participant and trial) and `transitions` (one row per
//! participant) into the output directory.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use hidden_single_core::model::{path_posterior, transition_trial, AggregateParams, StrategyClass};
use hidden_single_core::puzzle::ResponseRole;

use crate::args::SequencePhase;
use crate::commands::{data_seed, load_participants, sequence};
use crate::error::{CliError, Result};
use crate::files::{write_table, Format, Meta};
use crate::{params, Ctx};

pub const MARGINAL_COLUMNS: [&str; 6] = ["session", "t", "p_ug", "p_adc", "p_pd", "p_s"];
pub const TRANSITION_COLUMNS: [&str; 8] =
    ["session", "trials", "t_adc", "t_pd", "t_s", "map_path", "map_prob", "log_evidence"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalRow {
    pub session: String,
    pub t: usize,
    pub p_ug: f64,
    pub p_adc: f64,
    pub p_pd: f64,
    pub p_s: f64,
}

/// Transition trials are the first trials where the posterior puts more
/// than half its mass at or beyond the strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRow {
    pub session: String,
    pub trials: usize,
    pub t_adc: Option<usize>,
    pub t_pd: Option<usize>,
    pub t_s: Option<usize>,
    pub map_path: Option<String>,
    pub map_prob: Option<f64>,
    pub log_evidence: Option<f64>,
}

pub fn infer_one(session: &str, responses: &[ResponseRole], p: &AggregateParams) -> (Vec<MarginalRow>, TransitionRow) {
    let mut tr = TransitionRow {
        session: session.to_string(),
        trials: responses.len(),
        t_adc: None,
        t_pd: None,
        t_s: None,
        map_path: None,
        map_prob: None,
        log_evidence: None,
    };
    let Ok(post) = path_posterior(responses, p) else {
        return (Vec::new(), tr);
    };
    let marginals = post
        .marginals()
        .iter()
        .enumerate()
        .map(|(i, m)| MarginalRow { session: session.to_string(), t: i + 1, p_ug: m[0], p_adc: m[1], p_pd: m[2], p_s: m[3] })
        .collect();
    tr.t_adc = transition_trial(&post, StrategyClass::AvoidDirectConstraints);
    tr.t_pd = transition_trial(&post, StrategyClass::PrevalentDigits);
    tr.t_s = transition_trial(&post, StrategyClass::Successful);
    if let Some((path, w)) = post.top_paths(1).into_iter().next() {
        tr.map_path = Some(path.label());
        tr.map_prob = Some(w);
    }
    tr.log_evidence = Some(post.log_evidence());
    (marginals, tr)
}

pub fn run(ctx: &Ctx, input: &Path, phase: SequencePhase) -> Result<()> {
    let dir = ctx.out_dir("infer")?;
    let spec = ctx.global.params.as_deref().ok_or_else(|| CliError::Usage("infer needs --params".into()))?;
    let (p, source) = params::resolve(spec)?;
    let (input_meta, participants) = load_participants(input)?;
    let results: Vec<(Vec<MarginalRow>, TransitionRow)> =
        participants.par_iter().map(|d| infer_one(&d.session, &sequence(d, phase), &p)).collect();
    let impossible = results.iter().filter(|(m, _)| m.is_empty()).count();
    if impossible > 0 {
        ctx.note(&format!("{impossible} participant(s) have zero probability under {source}"));
    }
    let meta = Meta::new("infer", data_seed(ctx, input_meta.as_ref()))
        .with("input", input.display().to_string())
        .with("params", &source)
        .with("phase", format!("{phase:?}").to_lowercase());
    let ext = match ctx.format() {
        Format::Csv => "csv",
        Format::Jsonl => "jsonl",
    };
    let (marginals, transitions): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let marginals: Vec<MarginalRow> = marginals.into_iter().flatten().collect();
    write_table(Some(&dir.join(format!("marginals.{ext}"))), ctx.format(), &meta, &MARGINAL_COLUMNS, &marginals)?;
    write_table(Some(&dir.join(format!("transitions.{ext}"))), ctx.format(), &meta, &TRANSITION_COLUMNS, &transitions)?;
    ctx.note(&format!("inferred {} participants", transitions.len()));
    Ok(())
}
