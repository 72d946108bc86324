use serde::{Deserialize, Serialize};

use crate::boosting::params::{sigmoid, Loss};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub logloss: f64,
    pub zero_one: f64,
    pub n_eval: usize,
}

/// Logloss of `sigmoid(score)` clipped to `[1e-15, 1 - 1e-15]`, and the
/// zero-one loss of predicting 1 when the probability exceeds 0.5.
pub fn eval_metrics(scores: &[f64], labels: &[f64]) -> Result<MetricReport> {
    if scores.is_empty() {
        return Err(Error::invalid("no predictions to evaluate"));
    }
    if scores.len() != labels.len() {
        return Err(Error::invalid(format!("{} scores for {} labels", scores.len(), labels.len())));
    }
    if labels.iter().any(|&y| y != 0.0 && y != 1.0) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    let n = scores.len() as f64;
    let logloss = Loss::Logloss.mean(scores, labels);
    let errors = scores
        .iter()
        .zip(labels)
        .filter(|(&s, &y)| (sigmoid(s) > 0.5) != (y == 1.0))
        .count();
    Ok(MetricReport {
        logloss,
        zero_one: errors as f64 / n,
        n_eval: scores.len(),
    })
}

/// Relative change of `value` against `baseline` in percent; positive means
/// a larger loss than the baseline.
pub fn relative_change(value: f64, baseline: f64) -> f64 {
    (value - baseline) / baseline * 100.0
}
