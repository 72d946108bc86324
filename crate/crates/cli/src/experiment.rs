//! Ablation grids. Each kind trains a set of variants on every seed and
//! reports test metrics next to their relative change against a baseline
//! variant; positive percentages mean a larger loss than the baseline.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use ordboost::metrics::relative_change;
use ordboost::shift_lab::{predicted_shift, simulate_two_stumps, BiasReport};
use ordboost::synth::high_cardinality;
use ordboost::{eval_metrics, split, train, BoostParams, Dataset, FeatureSchema, MetricReport, MissingPolicy, Mode, TsMode};
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::{load_training_data, read_header};
use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Greedy, holdout and leave-one-out statistics against ordered ones.
    TsCompare,
    /// Plain against Ordered boosting.
    ModeCompare,
    /// Number of permutations.
    Permutations,
    /// Maximum features per categorical combination.
    Combinations,
    /// Two-stump prediction-shift simulation.
    Shift,
    /// Plain against Ordered on growing fractions of the training data.
    SizeSweep,
}

#[derive(Clone, Debug)]
struct Variant {
    name: String,
    baseline: String,
    params: BoostParams,
    fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRow {
    pub variant: String,
    pub seed: u64,
    pub logloss: f64,
    pub zero_one: f64,
    pub n_eval: usize,
    pub logloss_rel_pct: f64,
    pub zero_one_rel_pct: f64,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariantSummary {
    pub variant: String,
    pub baseline: String,
    /// Means over seeds.
    pub logloss: f64,
    pub zero_one: f64,
    pub logloss_rel_pct: f64,
    pub zero_one_rel_pct: f64,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftRow {
    pub s: u8,
    pub t: u8,
    pub bias: f64,
    pub standard_error: f64,
    /// Closed-form shift for shared data; zero for independent samples.
    pub predicted: f64,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub kind: ExperimentKind,
    pub config_hash: String,
    pub runs: Vec<RunRow>,
    pub variants: Vec<VariantSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<BiasReport>,
}

impl ExperimentSummary {
    pub fn variant(&self, name: &str) -> Option<&VariantSummary> {
        self.variants.iter().find(|v| v.variant == name)
    }

    pub fn run(&self, variant: &str, seed: u64) -> Option<&RunRow> {
        self.runs.iter().find(|r| r.variant == variant && r.seed == seed)
    }
}

fn variants(kind: ExperimentKind, cfg: &RunConfig) -> Result<Vec<Variant>> {
    let base = &cfg.params;
    let grid = &cfg.experiment;
    let v = |name: String, baseline: &str, params: BoostParams, fraction: f64| Variant {
        name,
        baseline: baseline.to_string(),
        params,
        fraction,
    };
    Ok(match kind {
        ExperimentKind::TsCompare => [TsMode::Ordered, TsMode::Greedy, TsMode::Holdout, TsMode::LeaveOneOut]
            .into_iter()
            .map(|ts_mode| v(ts_mode.to_string(), "ordered", BoostParams { ts_mode, ..base.clone() }, 1.0))
            .collect(),
        ExperimentKind::ModeCompare => [("ordered", Mode::Ordered), ("plain", Mode::Plain)]
            .into_iter()
            .map(|(name, mode)| v(name.into(), "ordered", BoostParams { mode, ..base.clone() }, 1.0))
            .collect(),
        ExperimentKind::Permutations => {
            let Some(&first) = grid.permutations.first() else { bail!("permutations grid is empty") };
            let baseline = format!("s={first}");
            grid.permutations
                .iter()
                .map(|&s| v(format!("s={s}"), &baseline, BoostParams { permutations: s, ..base.clone() }, 1.0))
                .collect()
        }
        ExperimentKind::Combinations => {
            let Some(&first) = grid.max_combination.first() else { bail!("max_combination grid is empty") };
            let baseline = format!("c_max={first}");
            grid.max_combination
                .iter()
                .map(|&c| v(format!("c_max={c}"), &baseline, BoostParams { max_combination: c, ..base.clone() }, 1.0))
                .collect()
        }
        ExperimentKind::SizeSweep => {
            if grid.fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
                bail!("fractions must lie in (0, 1]");
            }
            grid.fractions
                .iter()
                .flat_map(|&f| {
                    let baseline = format!("ordered@{f}");
                    [
                        v(baseline.clone(), &baseline, BoostParams { mode: Mode::Ordered, ..base.clone() }, f),
                        v(format!("plain@{f}"), &baseline, BoostParams { mode: Mode::Plain, ..base.clone() }, f),
                    ]
                })
                .collect()
        }
        ExperimentKind::Shift => Vec::new(),
    })
}

fn seed_data(cfg: &RunConfig, seed: u64) -> Result<(Dataset, Dataset)> {
    let grid = &cfg.experiment;
    let full = match &grid.train {
        Some(path) => load_training_data(path, &cfg.target, &cfg.categorical)?,
        None => high_cardinality(&grid.synthetic, seed)?,
    };
    match (&grid.train, &grid.test) {
        (Some(_), Some(test)) => {
            let schema = FeatureSchema::from_header(&read_header(test)?, &cfg.categorical, &cfg.target)?;
            let test = ordboost::load_csv_aligned(test, &schema, &MissingPolicy::default(), full.layout())
                .with_context(|| format!("loading {}", test.display()))?;
            Ok((full, test))
        }
        _ => Ok(split(&full, grid.test_fraction, seed)?),
    }
}

fn subsample(data: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if fraction >= 1.0 {
        return Ok(data.clone());
    }
    Ok(split(data, 1.0 - fraction, seed)?.0)
}

fn run_variant(v: &Variant, seed: u64, train_data: &Dataset, test: &Dataset) -> Result<MetricReport> {
    let params = BoostParams { seed, ..v.params.clone() };
    let data = subsample(train_data, v.fraction, seed)?;
    let model = train(&data, &params).with_context(|| format!("training {} (seed {seed})", v.name))?;
    Ok(eval_metrics(&model.predict(test)?, test.targets())?)
}

pub fn run_experiment(kind: ExperimentKind, cfg: &RunConfig) -> Result<ExperimentSummary> {
    let hash = cfg.hash();
    if kind == ExperimentKind::Shift {
        let report = simulate_two_stumps(&cfg.experiment.shift)?;
        return Ok(ExperimentSummary {
            kind,
            config_hash: hash,
            runs: Vec::new(),
            variants: Vec::new(),
            shift: Some(report),
        });
    }
    let seeds = &cfg.experiment.seeds;
    if seeds.is_empty() {
        bail!("no seeds configured");
    }
    let variants = variants(kind, cfg)?;
    let data = seeds
        .par_iter()
        .map(|&s| seed_data(cfg, s))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..variants.len())
        .flat_map(|v| (0..seeds.len()).map(move |s| (v, s)))
        .collect();
    let metrics = jobs
        .par_iter()
        .map(|&(v, s)| run_variant(&variants[v], seeds[s], &data[s].0, &data[s].1))
        .collect::<Result<Vec<_>>>()?;
    let metric = |v: usize, s: usize| &metrics[v * seeds.len() + s];
    let index_of = |name: &str| variants.iter().position(|v| v.name == name).expect("baseline is a variant");

    let mut runs = Vec::new();
    let mut summaries = Vec::new();
    for (vi, v) in variants.iter().enumerate() {
        let bi = index_of(&v.baseline);
        for (si, &seed) in seeds.iter().enumerate() {
            let (m, b) = (metric(vi, si), metric(bi, si));
            runs.push(RunRow {
                variant: v.name.clone(),
                seed,
                logloss: m.logloss,
                zero_one: m.zero_one,
                n_eval: m.n_eval,
                logloss_rel_pct: relative_change(m.logloss, b.logloss),
                zero_one_rel_pct: relative_change(m.zero_one, b.zero_one),
                config_hash: hash.clone(),
            });
        }
        let mean = |idx: usize, f: fn(&MetricReport) -> f64| {
            (0..seeds.len()).map(|s| f(metric(idx, s))).sum::<f64>() / seeds.len() as f64
        };
        let (ll, zo) = (mean(vi, |m| m.logloss), mean(vi, |m| m.zero_one));
        summaries.push(VariantSummary {
            variant: v.name.clone(),
            baseline: v.baseline.clone(),
            logloss: ll,
            zero_one: zo,
            logloss_rel_pct: relative_change(ll, mean(bi, |m| m.logloss)),
            zero_one_rel_pct: relative_change(zo, mean(bi, |m| m.zero_one)),
            config_hash: hash.clone(),
        });
    }
    Ok(ExperimentSummary {
        kind,
        config_hash: hash,
        runs,
        variants: summaries,
        shift: None,
    })
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `results.csv` (one row per variant and seed), `summary.csv` (one
/// row per variant) and `summary.json`; the shift kind writes `shift.csv`
/// and `shift.json` instead of the two metric tables.
pub fn write_reports(summary: &ExperimentSummary, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    if let Some(report) = &summary.shift {
        let predicted = |t| if report.config.shared_data { predicted_shift(report.config.n, report.config.c2, t) } else { 0.0 };
        let rows: Vec<ShiftRow> = report
            .points
            .iter()
            .map(|p| ShiftRow {
                s: p.s,
                t: p.t,
                bias: p.bias,
                standard_error: p.standard_error,
                predicted: predicted(p.t),
                config_hash: summary.config_hash.clone(),
            })
            .collect();
        write_csv(&dir.join("shift.csv"), &rows)?;
        std::fs::write(dir.join("shift.json"), serde_json::to_string_pretty(report)?)?;
    } else {
        write_csv(&dir.join("results.csv"), &summary.runs)?;
        write_csv(&dir.join("summary.csv"), &summary.variants)?;
    }
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(summary)?)?;
    Ok(())
}
