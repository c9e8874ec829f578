//! Sending prompts to a text-completion endpoint and scoring the answers.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{parse_for, PromptSpec};
use crate::puzzle::{classify_response, HiddenSinglePuzzle, ResponseRole};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("endpoint returned status {0}")]
    Status(u16),
    #[error("malformed response: {0}")]
    Malformed(String),
}

impl CompletionError {
    fn retryable(&self) -> bool {
        match self {
            CompletionError::Transport(_) => true,
            CompletionError::Status(s) => *s >= 500 || *s == 429,
            _ => false,
        }
    }
}

pub trait Completer: Sync {
    fn complete(&self, prompt: &str) -> Result<String, CompletionError>;
}

impl<F> Completer for F
where
    F: Fn(&str) -> Result<String, CompletionError> + Sync,
{
    fn complete(&self, prompt: &str) -> Result<String, CompletionError> {
        self(prompt)
    }
}

/// Endpoint settings. The token is read from the named environment variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub url: String,
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_token_env")]
    pub token_env: String,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

fn default_max_tokens() -> u32 {
    256
}

fn default_token_env() -> String {
    "LLM_API_TOKEN".to_string()
}

fn default_timeout() -> u64 {
    60
}

/// Client for completion endpoints that accept `{model, prompt, temperature,
/// max_tokens}` and answer with `{choices: [{text}]}`.
pub struct HttpCompleter {
    config: EndpointConfig,
    token: Option<String>,
    agent: ureq::Agent,
}

impl HttpCompleter {
    pub fn new(config: EndpointConfig) -> Self {
        let token = std::env::var(&config.token_env).ok();
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        HttpCompleter { config, token, agent }
    }
}

impl Completer for HttpCompleter {
    fn complete(&self, prompt: &str) -> Result<String, CompletionError> {
        let body = serde_json::json!({
            "model": self.config.model,
            "prompt": prompt,
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        });
        let mut req = self.agent.post(&self.config.url);
        if let Some(t) = &self.token {
            req = req.header("Authorization", &format!("Bearer {t}"));
        }
        let mut resp = req.send_json(&body).map_err(|e| CompletionError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        if status != 200 {
            return Err(CompletionError::Status(status));
        }
        let v: serde_json::Value =
            resp.body_mut().read_json().map_err(|e| CompletionError::Malformed(e.to_string()))?;
        v.pointer("/choices/0/text")
            .and_then(|t| t.as_str())
            .map(str::to_string)
            .ok_or_else(|| CompletionError::Malformed("missing choices[0].text".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchItem {
    pub puzzle_id: String,
    pub spec: PromptSpec,
    pub prompt: String,
    pub puzzle: HiddenSinglePuzzle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchOptions {
    pub parallelism: usize,
    /// Total attempts per prompt.
    pub attempts: usize,
    pub backoff_ms: u64,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions { parallelism: 4, attempts: 3, backoff_ms: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRow {
    pub puzzle_id: String,
    pub spec: String,
    pub answer: Option<u8>,
    pub role: Option<String>,
    pub correct: bool,
    #[serde(skip)]
    pub completion: Option<String>,
    #[serde(skip)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchResult {
    pub rows: Vec<ResultRow>,
    pub accuracy: f64,
    /// Share of all prompts answered with each role, in role order.
    pub role_rates: [f64; 4],
    pub unanswered: usize,
}

fn complete_with_retry(c: &dyn Completer, prompt: &str, opts: &BatchOptions) -> Result<String, CompletionError> {
    let mut delay = opts.backoff_ms;
    let mut attempt = 1;
    loop {
        match c.complete(prompt) {
            Ok(t) => return Ok(t),
            Err(e) if e.retryable() && attempt < opts.attempts.max(1) => {
                thread::sleep(Duration::from_millis(delay));
                delay = delay.saturating_mul(2);
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

fn score(item: &BatchItem, outcome: Result<String, CompletionError>) -> ResultRow {
    let spec = item.spec.label();
    match outcome {
        Ok(text) => {
            let answer = parse_for(&item.spec, &text);
            let role = answer.map(|d| classify_response(&item.puzzle, d));
            ResultRow {
                puzzle_id: item.puzzle_id.clone(),
                spec,
                answer: answer.map(|d| d.get()),
                role: role.map(|r| r.as_str().to_string()),
                correct: role == Some(ResponseRole::Target),
                completion: Some(text),
                error: None,
            }
        }
        Err(e) => ResultRow {
            puzzle_id: item.puzzle_id.clone(),
            spec,
            answer: None,
            role: None,
            correct: false,
            completion: None,
            error: Some(e.to_string()),
        },
    }
}

pub fn run_batch(items: &[BatchItem], completer: &dyn Completer, opts: &BatchOptions) -> BatchResult {
    let work = || -> Vec<ResultRow> {
        items
            .par_iter()
            .map(|it| score(it, complete_with_retry(completer, &it.prompt, opts)))
            .collect()
    };
    let rows = match rayon::ThreadPoolBuilder::new().num_threads(opts.parallelism.max(1)).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    };
    let n = rows.len().max(1) as f64;
    let mut counts = [0usize; 4];
    for r in &rows {
        if let Some(role) = r.role.as_deref().and_then(ResponseRole::parse) {
            counts[role.index()] += 1;
        }
    }
    let role_rates = counts.map(|c| c as f64 / n);
    BatchResult {
        accuracy: rows.iter().filter(|r| r.correct).count() as f64 / n,
        unanswered: rows.iter().filter(|r| r.answer.is_none()).count(),
        role_rates,
        rows,
    }
}

/// Writes each prompt to `<dir>/<puzzle_id>__<spec>.txt` without sending anything.
pub fn write_dry_run(dir: &Path, items: &[BatchItem]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    items
        .iter()
        .map(|it| {
            let path = dir.join(format!("{}__{}.txt", it.puzzle_id, it.spec.label()));
            fs::write(&path, &it.prompt)?;
            Ok(path)
        })
        .collect()
}

pub fn results_to_csv<W: io::Write>(rows: &[ResultRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
