//! Synthetic cohorts written as per-trial rows, the same layout the
//! service exports.

use std::path::Path;

use hidden_single_core::agents::simulate_cohort;
use hidden_single_core::export::{path_rows, synthetic_rows, EXPORT_COLUMNS};

use crate::error::{CliError, Result};
use crate::files::{write_table, Meta};
use crate::{params, Ctx};

pub const PATH_COLUMNS: [&str; 4] = ["session", "phase", "trial", "strategy"];

pub fn run(ctx: &Ctx, trials: usize, practice: usize, paths: Option<&Path>) -> Result<()> {
    if trials == 0 || practice > trials {
        return Err(CliError::Usage(format!("need 0 < --practice ({practice}) <= --trials ({trials})")));
    }
    let spec = ctx.global.params.as_deref().unwrap_or("solver");
    let (p, source) = params::resolve(spec)?;
    let n = ctx.n(500)?;
    let seed = ctx.seed();
    let cohort = simulate_cohort(n, &p, trials, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let meta = Meta::new("simulate", Some(seed))
        .with("params", &source)
        .with("n", n)
        .with("trials", trials)
        .with("practice", practice);
    write_table(ctx.out(), ctx.format(), &meta, &EXPORT_COLUMNS, &synthetic_rows(&cohort, practice, seed))?;
    if let Some(path) = paths {
        write_table(Some(path), ctx.format(), &meta, &PATH_COLUMNS, &path_rows(&cohort, practice))?;
    }
    ctx.note(&format!("simulated {n} agents over {trials} trials from {source}"));
    Ok(())
}
