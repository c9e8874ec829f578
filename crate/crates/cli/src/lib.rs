//! Batch entry points of the `hidden-single` tool.
//!
//! Stages exchange files rather than pipes, so every intermediate artifact
//! can be inspected. Each output records the seed and format version.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod files;
pub mod params;

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use args::{Cli, Command, Global};
use config::RunConfig;
use error::{CliError, Result};
use files::Format;

/// Global settings after merging the config file and flags.
#[derive(Debug)]
pub struct Ctx {
    pub global: Global,
    pub config: RunConfig,
    seed: OnceLock<u64>,
}

impl Ctx {
    pub fn new(global: Global) -> Result<Self> {
        let config = match &global.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let seed = OnceLock::new();
        if let Some(s) = global.seed.or(config.seed) {
            let _ = seed.set(s);
        }
        Ok(Ctx { global, config, seed })
    }

    /// The run seed. Without one, a seed is drawn once and reported so the
    /// run can be repeated.
    pub fn seed(&self) -> u64 {
        *self.seed.get_or_init(|| {
            let s: u64 = rand::random();
            self.note(&format!("seed: {s} (generated)"));
            s
        })
    }

    /// The seed if one was given or already drawn.
    pub fn seed_if_set(&self) -> Option<u64> {
        self.seed.get().copied()
    }

    pub fn quiet(&self) -> bool {
        self.global.quiet || self.config.quiet.unwrap_or(false)
    }

    pub fn note(&self, msg: &str) {
        if !self.quiet() {
            eprintln!("{msg}");
        }
    }

    pub fn format(&self) -> Format {
        self.global.format.or(self.config.format).unwrap_or_default()
    }

    pub fn out(&self) -> Option<&Path> {
        self.global.out.as_deref()
    }

    pub fn out_dir(&self, command: &str) -> Result<PathBuf> {
        self.global.out.clone().ok_or_else(|| CliError::Usage(format!("{command} needs --out DIR")))
    }

    pub fn n(&self, default: usize) -> Result<usize> {
        match self.global.n.unwrap_or(default) {
            0 => Err(CliError::Usage("--n must be positive".into())),
            n => Ok(n),
        }
    }

    pub fn threads(&self) -> Option<usize> {
        self.global.threads.or(self.config.threads)
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx::new(cli.global)?;
    match ctx.threads() {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| dispatch(&ctx, cli.command)),
        None => dispatch(&ctx, cli.command),
    }
}

fn dispatch(ctx: &Ctx, command: Command) -> Result<()> {
    use commands::*;
    match command {
        Command::Gen { assignments } => gen::run(ctx, assignments),
        Command::Verify { input } => verify::run(ctx, &input),
        Command::Schedule { check_seeds } => schedule::run(ctx, check_seeds),
        Command::Simulate { trials, practice, paths } => simulate::run(ctx, trials, practice, paths.as_deref()),
        Command::Fit { input, phase, steps, learning_rate } => fit::run(ctx, &input, phase, steps, learning_rate),
        Command::Infer { input, phase } => infer::run(ctx, &input, phase),
        Command::Classify { input } => classify::run(ctx, &input),
        Command::Report { input, group } => report::run(ctx, &input, group),
        Command::Prompts { input, spec, dry_run, endpoint } => {
            prompts::run(ctx, input.as_deref(), &spec, dry_run, endpoint.as_deref())
        }
        Command::Serve { addr, data, test_mode, no_fsync } => serve::run(ctx, addr, data, test_mode, no_fsync),
    }
}
