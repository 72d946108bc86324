use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ordboost::shift_lab::TwoStumpConfig;
use ordboost::synth::HighCardinalityConfig;
use ordboost::BoostParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Configuration shared by `train` and `experiment`. Every field is optional;
/// unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Target column name. Default `"y"`.
    pub target: String,
    /// Columns treated as categorical; all others are numerical.
    pub categorical: Vec<String>,
    pub params: BoostParams,
    pub experiment: ExperimentConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            target: "y".into(),
            categorical: Vec::new(),
            params: BoostParams::default(),
            experiment: ExperimentConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Training CSV. Without it a synthetic dataset is generated per seed.
    pub train: Option<PathBuf>,
    /// Test CSV. Without it `test_fraction` of the training data is held out.
    pub test: Option<PathBuf>,
    pub test_fraction: f64,
    pub synthetic: HighCardinalityConfig,
    pub seeds: Vec<u64>,
    /// `permutations` grid; the first entry is the baseline.
    pub permutations: Vec<usize>,
    /// `combinations` grid over the maximum features per combination; the
    /// first entry is the baseline.
    pub max_combination: Vec<usize>,
    /// `size-sweep` grid of training-set fractions.
    pub fractions: Vec<f64>,
    pub shift: TwoStumpConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            train: None,
            test: None,
            test_fraction: 0.2,
            synthetic: HighCardinalityConfig::default(),
            seeds: vec![0],
            permutations: vec![1, 3, 9],
            max_combination: vec![1, 2, 3],
            fractions: vec![0.1, 0.25, 0.5, 1.0],
            shift: TwoStumpConfig {
                n: 10,
                c1: 2.0,
                c2: 1.0,
                shared_data: true,
                replicates: 200_000,
                seed: 0,
            },
        }
    }
}

impl RunConfig {
    /// Reads a config file. Relative dataset paths are resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.experiment.train, &mut cfg.experiment.test].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.params.validate()?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}
