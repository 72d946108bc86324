use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ordboost::boosting::train_with_log;
use ordboost::{eval_metrics, load_csv, load_csv_aligned, Dataset, FeatureSchema, MetricReport, MissingPolicy, TrainedModel};

use crate::config::RunConfig;

pub fn read_header(path: &Path) -> Result<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(reader.headers()?.iter().map(|h| h.trim().to_string()).collect())
}

/// Loads a training CSV; columns not listed as categorical are numerical.
pub fn load_training_data(path: &Path, target: &str, categorical: &[String]) -> Result<Dataset> {
    let header = read_header(path)?;
    let schema = FeatureSchema::from_header(&header, categorical, target)?;
    load_csv(path, &schema, &MissingPolicy::default()).with_context(|| format!("loading {}", path.display()))
}

/// Loads a CSV with the feature layout a model was trained on.
pub fn load_for_model(path: &Path, model: &TrainedModel) -> Result<Dataset> {
    let layout = model.layout();
    let header = read_header(path)?;
    let categorical: Vec<String> = layout.categorical.iter().map(|c| c.name.clone()).collect();
    let schema = FeatureSchema::from_header(&header, &categorical, &layout.target)?;
    load_csv_aligned(path, &schema, &MissingPolicy::default(), layout).with_context(|| format!("loading {}", path.display()))
}

/// Default training-log path: `<model>.log.csv`.
pub fn log_path(model: &Path) -> PathBuf {
    let mut name = model.as_os_str().to_owned();
    name.push(".log.csv");
    PathBuf::from(name)
}

pub fn train(config: &Path, data: &Path, out: &Path, log: Option<&Path>) -> Result<TrainedModel> {
    let cfg = RunConfig::load(config)?;
    let dataset = load_training_data(data, &cfg.target, &cfg.categorical)?;
    let (model, trace) = train_with_log(&dataset, &cfg.params)?;
    model.save(out)?;
    let log = log.map(Path::to_path_buf).unwrap_or_else(|| log_path(out));
    let mut w = csv::Writer::from_path(&log).with_context(|| format!("writing {}", log.display()))?;
    w.write_record(["iteration", "train_loss"])?;
    for (i, loss) in trace.train_loss.iter().enumerate() {
        w.write_record([(i + 1).to_string(), format!("{loss:?}")])?;
    }
    w.flush()?;
    Ok(model)
}

pub fn predict(model: &Path, data: &Path, out: &Path) -> Result<Vec<f64>> {
    let model = TrainedModel::load(model)?;
    let dataset = load_for_model(data, &model)?;
    let scores = model.predict(&dataset)?;
    let mut w = csv::Writer::from_path(out).with_context(|| format!("writing {}", out.display()))?;
    w.write_record(["score"])?;
    for s in &scores {
        w.write_record([format!("{s:?}")])?;
    }
    w.flush()?;
    Ok(scores)
}

fn read_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let Some(idx) = reader.headers()?.iter().position(|h| h.trim() == column) else {
        return Err(ordboost::Error::Schema(format!("{} has no column {column:?}", path.display())).into());
    };
    reader
        .records()
        .enumerate()
        .map(|(i, r)| {
            let cell = r?.get(idx).unwrap_or("").trim().to_string();
            cell.parse::<f64>()
                .with_context(|| format!("{} row {}: {cell:?} is not a number", path.display(), i + 1))
        })
        .collect()
}

pub fn eval(pred: &Path, data: &Path, target: &str) -> Result<MetricReport> {
    let scores = read_column(pred, "score")?;
    let labels = read_column(data, target)?;
    if scores.len() != labels.len() {
        bail!("{} scores for {} labelled rows", scores.len(), labels.len());
    }
    Ok(eval_metrics(&scores, &labels)?)
}

pub fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}
