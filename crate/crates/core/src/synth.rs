//! Synthetic datasets for experiments and tests.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boosting::params::sigmoid;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::random::{self, Domain};

/// Binary classification with one high-cardinality categorical feature whose
/// categories carry most of the signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HighCardinalityConfig {
    pub n_rows: usize,
    pub n_categories: usize,
    /// Half-width of the uniform per-category logit effect.
    pub effect_scale: f64,
    pub n_numeric: usize,
    /// Weight of the first numerical feature in the logit.
    pub numeric_weight: f64,
    /// Extra categorical features that take a single value.
    pub constant_features: usize,
}

impl Default for HighCardinalityConfig {
    fn default() -> Self {
        Self {
            n_rows: 10_000,
            n_categories: 2_000,
            effect_scale: 2.0,
            n_numeric: 2,
            numeric_weight: 0.5,
            constant_features: 0,
        }
    }
}

pub fn high_cardinality(cfg: &HighCardinalityConfig, seed: u64) -> Result<Dataset> {
    if cfg.n_rows == 0 || cfg.n_categories == 0 {
        return Err(Error::invalid("synthetic data needs rows and categories"));
    }
    let mut rng = random::stream(seed, Domain::Synthetic, 0);
    let effects: Vec<f64> = (0..cfg.n_categories)
        .map(|_| rng.gen_range(-cfg.effect_scale..=cfg.effect_scale))
        .collect();
    let cats: Vec<u32> = (0..cfg.n_rows)
        .map(|_| rng.gen_range(0..cfg.n_categories as u32))
        .collect();
    let numeric: Vec<Vec<f64>> = (0..cfg.n_numeric)
        .map(|_| (0..cfg.n_rows).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let y: Vec<f64> = (0..cfg.n_rows)
        .map(|i| {
            let mut logit = effects[cats[i] as usize];
            if let Some(x) = numeric.first() {
                logit += cfg.numeric_weight * x[i];
            }
            f64::from(rng.gen_bool(sigmoid(logit)))
        })
        .collect();
    let mut b = Dataset::builder();
    for (j, x) in numeric.into_iter().enumerate() {
        b = b.numeric(format!("x{j}"), x);
    }
    b = b.categorical_ids("cat", cats, cfg.n_categories);
    for j in 0..cfg.constant_features {
        b = b.categorical_ids(format!("const{j}"), vec![0; cfg.n_rows], 1);
    }
    b.target("y", y).build()
}

/// Regression `y = sin(2 pi x0) + x1^2 + 0.5 x2 + noise` with uniform features.
pub fn regression(n_rows: usize, n_features: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if n_rows == 0 || n_features == 0 {
        return Err(Error::invalid("synthetic data needs rows and features"));
    }
    let mut rng = random::stream(seed, Domain::Synthetic, 1);
    let x: Vec<Vec<f64>> = (0..n_features)
        .map(|_| (0..n_rows).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let y = (0..n_rows)
        .map(|i| {
            let mut v = (2.0 * std::f64::consts::PI * x[0][i]).sin();
            if n_features > 1 {
                v += x[1][i] * x[1][i];
            }
            if n_features > 2 {
                v += 0.5 * x[2][i];
            }
            v + noise * rng.gen_range(-1.0..1.0)
        })
        .collect();
    let mut b = Dataset::builder();
    for (j, col) in x.into_iter().enumerate() {
        b = b.numeric(format!("x{j}"), col);
    }
    b.target("y", y).build()
}
