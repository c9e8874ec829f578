//! Resolution of `--params` values into model parameters.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hidden_single_core::model::{non_solver_params, solver_params, AggregateParams, ParamsRecord, StrategyClass};

use crate::error::{CliError, Result};
use crate::files::{read_to_string, Meta};

/// A parameter file: either a bare record or a document holding one under
/// `params`, as written by `fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub params: ParamsRecord,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyParams {
    Wrapped(ParamsFile),
    Bare(ParamsRecord),
}

/// Built-in names first, then a file path, then the path with `.json`.
pub fn resolve(spec: &str) -> Result<(AggregateParams, String)> {
    match spec.to_ascii_lowercase().as_str() {
        "solver" | "solvers" => return Ok((solver_params(), "solver".into())),
        "non-solver" | "non-solvers" | "non_solver" | "non_solvers" => {
            return Ok((non_solver_params(), "non-solver".into()))
        }
        _ => {}
    }
    if let Some(name) = spec.strip_prefix("pure:") {
        let s = StrategyClass::parse(name)
            .ok_or_else(|| CliError::Usage(format!("unknown strategy {name:?}; use UG, ADC, PD or S")))?;
        return Ok((AggregateParams::pure(s), format!("pure:{}", s.abbrev())));
    }
    let path = PathBuf::from(spec);
    let path = if path.exists() { path } else { PathBuf::from(format!("{spec}.json")) };
    if !path.exists() {
        return Err(CliError::Usage(format!("--params {spec:?} is neither a built-in name nor a file")));
    }
    Ok((load(&path)?, path.display().to_string()))
}

pub fn load(path: &Path) -> Result<AggregateParams> {
    let record = match serde_json::from_str::<AnyParams>(&read_to_string(path)?) {
        Ok(AnyParams::Wrapped(f)) => f.params,
        Ok(AnyParams::Bare(r)) => r,
        Err(e) => return Err(CliError::format(path, e)),
    };
    AggregateParams::from_record(&record).map_err(|e| CliError::format(path, e))
}
