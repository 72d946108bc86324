use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::target_stats::TsMode;
use crate::tree::ObliviousTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Plain,
    Ordered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    Logloss,
    Mse,
}

impl Loss {
    /// Derivative of the loss with respect to the raw score. The squared
    /// error drops its factor 2.
    #[inline]
    pub fn gradient(self, score: f64, target: f64) -> f64 {
        match self {
            Loss::Mse => score - target,
            Loss::Logloss => sigmoid(score) - target,
        }
    }

    /// Per-example loss; logloss clips the probability to `[1e-15, 1 - 1e-15]`.
    pub fn value(self, score: f64, target: f64) -> f64 {
        match self {
            Loss::Mse => (score - target) * (score - target),
            Loss::Logloss => {
                let q = sigmoid(score).clamp(1e-15, 1.0 - 1e-15);
                -(target * q.ln() + (1.0 - target) * (1.0 - q).ln())
            }
        }
    }

    pub fn mean(self, scores: &[f64], targets: &[f64]) -> f64 {
        if scores.is_empty() {
            return 0.0;
        }
        scores.iter().zip(targets).map(|(&s, &y)| self.value(s, y)).sum::<f64>() / scores.len() as f64
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Training parameters. Missing fields take the defaults below; unknown
/// fields are rejected when deserializing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostParams {
    pub mode: Mode,
    pub iterations: usize,
    pub learning_rate: f64,
    /// Number `s` of permutations used for tree structures.
    pub permutations: usize,
    pub loss: Loss,
    pub depth: usize,
    pub border_count: usize,
    /// Border count for target-statistic columns.
    pub ts_border_count: usize,
    pub bootstrap_temperature: f64,
    pub discard_fraction: f64,
    /// Maximum number of categorical features in a combination.
    pub max_combination: usize,
    /// Use each tree permutation for the target statistics as well.
    pub couple_permutations: bool,
    pub ts_mode: TsMode,
    pub prior_weight: f64,
    /// Prior for target statistics; the training target mean when absent.
    pub prior: Option<f64>,
    pub seed: u64,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self {
            mode: Mode::Ordered,
            iterations: 100,
            learning_rate: 0.1,
            permutations: 3,
            loss: Loss::Logloss,
            depth: 6,
            border_count: 255,
            ts_border_count: 15,
            bootstrap_temperature: 1.0,
            discard_fraction: 0.02,
            max_combination: 2,
            couple_permutations: true,
            ts_mode: TsMode::Ordered,
            prior_weight: 1.0,
            prior: None,
            seed: 0,
        }
    }
}

impl BoostParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if self.permutations == 0 {
            return bad("permutations must be at least 1".into());
        }
        if self.depth > ObliviousTree::MAX_DEPTH {
            return bad(format!("depth must be at most {}", ObliviousTree::MAX_DEPTH));
        }
        for (name, v) in [("border_count", self.border_count), ("ts_border_count", self.ts_border_count)] {
            if v == 0 || v > usize::from(u16::MAX) - 1 {
                return bad(format!("{name} must be in 1..=65534, got {v}"));
            }
        }
        if !(self.bootstrap_temperature >= 0.0 && self.bootstrap_temperature.is_finite()) {
            return bad(format!("bootstrap_temperature must be >= 0, got {}", self.bootstrap_temperature));
        }
        if !(0.0..1.0).contains(&self.discard_fraction) {
            return bad(format!("discard_fraction must be in [0, 1), got {}", self.discard_fraction));
        }
        if self.max_combination == 0 {
            return bad("max_combination must be at least 1".into());
        }
        if !(self.prior_weight > 0.0 && self.prior_weight.is_finite()) {
            return bad(format!("prior_weight must be positive, got {}", self.prior_weight));
        }
        if let Some(p) = self.prior {
            if !p.is_finite() {
                return bad("prior must be finite".into());
            }
        }
        Ok(())
    }

    /// Number of leading examples of a permutation excluded from split scoring.
    pub fn discard_count(&self, n: usize) -> usize {
        if self.discard_fraction == 0.0 {
            0
        } else {
            ((self.discard_fraction * n as f64).floor() as usize).max(1)
        }
    }
}
