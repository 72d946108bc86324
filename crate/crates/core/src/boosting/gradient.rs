use crate::boosting::params::Loss;
use crate::error::{Error, Result};

/// `g_i = dL(y_i, s)/ds` at `s = predictions[i]`.
pub fn calc_gradient(loss: Loss, predictions: &[f64], targets: &[f64]) -> Result<Vec<f64>> {
    if predictions.len() != targets.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    predictions
        .iter()
        .zip(targets)
        .map(|(&s, &y)| checked_gradient(loss, s, y))
        .collect()
}

#[inline]
pub(crate) fn checked_gradient(loss: Loss, score: f64, target: f64) -> Result<f64> {
    if !score.is_finite() {
        return Err(Error::Numerical(format!("non-finite prediction {score}")));
    }
    Ok(loss.gradient(score, target))
}
