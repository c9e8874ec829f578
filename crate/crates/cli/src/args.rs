//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::files::Format;

#[derive(Debug, Parser)]
#[command(name = "hidden-single", version, about = "Hidden-single Sudoku study toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Global {
    /// Seed for every random draw; a generated seed is reported and recorded.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of puzzles, agents or prompts.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Output file, or directory for commands that write several files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Model parameters: solver, non-solver, pure:<UG|ADC|PD|S>, or a JSON file.
    #[arg(long, global = true)]
    pub params: Option<String>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML run configuration; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Only errors on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SequencePhase {
    Practice,
    Test,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Group {
    All,
    Solvers,
    NonSolvers,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate puzzles as JSON lines.
    Gen {
        /// Distinct participant assignments to spread the puzzles over.
        #[arg(long)]
        assignments: Option<usize>,
    },
    /// Check a puzzle file; exits 1 listing every failure.
    Verify { input: PathBuf },
    /// Print and validate a 64-trial test schedule.
    Schedule {
        /// Also validate this many further schedules derived from the seed.
        #[arg(long)]
        check_seeds: Option<u64>,
    },
    /// Simulate a cohort of strategy agents as per-trial rows.
    Simulate {
        #[arg(long, default_value_t = 89)]
        trials: usize,
        /// Leading trials labelled as practice.
        #[arg(long, default_value_t = 25)]
        practice: usize,
        /// Also write each agent's hidden strategy per trial here.
        #[arg(long)]
        paths: Option<PathBuf>,
    },
    /// Fit aggregate model parameters to per-trial rows.
    Fit {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        phase: SequencePhase,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
    },
    /// Posterior strategy marginals and transition trials per participant.
    Infer {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        phase: SequencePhase,
    },
    /// Solver, persistent-solver and guesser labels per participant.
    Classify { input: PathBuf },
    /// Accuracy and response-time summaries by condition and trial set.
    Report {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        group: Group,
    },
    /// Write language-model prompts, or run them against an endpoint.
    Prompts {
        /// Puzzle file from `gen`; puzzles are generated when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated prompt labels such as list-4shot-mixed.
        #[arg(long, value_delimiter = ',')]
        spec: Vec<String>,
        /// Write prompt files without calling an endpoint.
        #[arg(long)]
        dry_run: bool,
        /// TOML endpoint description; the token comes from the environment.
        #[arg(long)]
        endpoint: Option<PathBuf>,
    },
    /// Run the HTTP session server.
    Serve {
        #[arg(long)]
        addr: Option<String>,
        /// Journal directory.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Accept client-chosen session seeds.
        #[arg(long)]
        test_mode: bool,
        #[arg(long)]
        no_fsync: bool,
    },
}
