//! Command-line front end: training, prediction, evaluation and ablation
//! experiments.

pub mod commands;
pub mod config;
pub mod experiment;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

pub use config::{ExperimentConfig, RunConfig};
pub use experiment::{run_experiment, write_reports, ExperimentKind, ExperimentSummary};

#[derive(Debug, Parser)]
#[command(name = "ordboost", version, about = "Ordered gradient boosting over oblivious trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write it with a per-iteration loss log.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Training log CSV; defaults to `<out>.log.csv`.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Score a CSV with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print logloss and zero-one loss of a score file as JSON.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "y")]
        target: String,
    },
    /// Run an ablation grid and write CSV and JSON reports.
    Experiment {
        #[arg(long, value_enum)]
        kind: ExperimentKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic dataset.
    Synth {
        #[arg(long, value_enum)]
        kind: SynthKind,
        #[arg(long, default_value_t = 10_000)]
        rows: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    /// Binary target driven by a 2000-category feature.
    HighCardinality,
    /// Smooth regression over four uniform features.
    Regression,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { config, data, out, log } => {
            commands::train(&config, &data, &out, log.as_deref())?;
        }
        Command::Predict { model, data, out } => {
            commands::predict(&model, &data, &out)?;
        }
        Command::Eval { pred, data, target } => {
            commands::print_json(&commands::eval(&pred, &data, &target)?)?;
        }
        Command::Experiment { kind, config, out } => {
            let cfg = RunConfig::load(&config)?;
            let summary = run_experiment(kind, &cfg)?;
            write_reports(&summary, &out)?;
            commands::print_json(&summary.variants)?;
        }
        Command::Synth { kind, rows, seed, out } => {
            let data = match kind {
                SynthKind::HighCardinality => ordboost::synth::high_cardinality(
                    &ordboost::synth::HighCardinalityConfig { n_rows: rows, ..Default::default() },
                    seed,
                )?,
                SynthKind::Regression => ordboost::synth::regression(rows, 4, 0.1, seed)?,
            };
            data.write_csv(&out)?;
        }
    }
    Ok(())
}

/// Process exit status for an error: 2 for schema mismatches, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<ordboost::Error>() {
        Some(ordboost::Error::Schema(_)) => 2,
        _ => 1,
    }
}
