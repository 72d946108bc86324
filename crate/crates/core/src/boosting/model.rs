use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boosting::combinations::CombinationIndex;
use crate::boosting::params::{sigmoid, BoostParams, Loss};
use crate::dataset::{ColumnLayout, Dataset};
use crate::error::{Error, Result};
use crate::target_stats::TsTable;
use crate::tree::{get_leaf, ObliviousTree, TsContext};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Apply-time statistics of one target-statistic source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSource {
    /// Member categorical features, sorted.
    pub features: Vec<u32>,
    pub table: TsTable,
    /// Category tuples of a combination, by id; empty for a single feature.
    pub tuples: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeEntry {
    pub tree: ObliviousTree,
    pub leaf_values: Vec<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: u32,
    params: BoostParams,
    layout: ColumnLayout,
    prior: f64,
    sources: Vec<ModelSource>,
    trees: Vec<TreeEntry>,
}

/// An ensemble `F(x) = sum_t lr * b^t[leaf_t(x)]` with leaves resolved
/// through full-data target statistics.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct TrainedModel {
    params: BoostParams,
    layout: ColumnLayout,
    prior: f64,
    sources: Vec<ModelSource>,
    trees: Vec<TreeEntry>,
    combinations: Vec<Option<CombinationIndex>>,
}

impl PartialEq for TrainedModel {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.layout == other.layout
            && self.prior.to_bits() == other.prior.to_bits()
            && self.sources == other.sources
            && self.trees == other.trees
    }
}

impl TryFrom<ModelFile> for TrainedModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        if f.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Model(format!(
                "unsupported model format version {} (expected {MODEL_FORMAT_VERSION})",
                f.format_version
            )));
        }
        let trees = f.trees.into_iter().map(|e| (e.tree, e.leaf_values)).collect();
        Self::new(f.params, f.layout, f.prior, f.sources, trees)
    }
}

impl From<TrainedModel> for ModelFile {
    fn from(m: TrainedModel) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            params: m.params,
            layout: m.layout,
            prior: m.prior,
            sources: m.sources,
            trees: m.trees,
        }
    }
}

impl TrainedModel {
    pub fn new(
        params: BoostParams,
        layout: ColumnLayout,
        prior: f64,
        sources: Vec<ModelSource>,
        trees: Vec<(ObliviousTree, Vec<f64>)>,
    ) -> Result<Self> {
        let n_cat = layout.categorical.len() as u32;
        let mut combinations = Vec::with_capacity(sources.len());
        for s in &sources {
            if s.features.is_empty() || s.features.iter().any(|&f| f >= n_cat) {
                return Err(Error::Model(format!("source over unknown features {:?}", s.features)));
            }
            if s.features.len() > 1 {
                if s.tuples.iter().any(|t| t.len() != s.features.len()) {
                    return Err(Error::Model("combination tuple of wrong width".into()));
                }
                combinations.push(Some(CombinationIndex::from_tuples(s.tuples.clone())));
            } else {
                combinations.push(None);
            }
        }
        let mut entries = Vec::with_capacity(trees.len());
        for (tree, leaf_values) in trees {
            if leaf_values.len() != tree.leaf_count() {
                return Err(Error::Model("leaf values do not match tree".into()));
            }
            for split in tree.splits() {
                let ok = match split.source {
                    crate::tree::SplitSource::Numeric { feature } => (feature as usize) < layout.numeric.len(),
                    crate::tree::SplitSource::Ts { source } => (source as usize) < sources.len(),
                };
                if !ok {
                    return Err(Error::Model(format!("split on unknown source {:?}", split.source)));
                }
            }
            entries.push(TreeEntry { tree, leaf_values });
        }
        Ok(Self {
            params,
            layout,
            prior,
            sources,
            trees: entries,
            combinations,
        })
    }

    pub fn params(&self) -> &BoostParams {
        &self.params
    }

    pub fn layout(&self) -> &ColumnLayout {
        &self.layout
    }

    pub fn learning_rate(&self) -> f64 {
        self.params.learning_rate
    }

    pub fn trees(&self) -> &[TreeEntry] {
        &self.trees
    }

    pub fn sources(&self) -> &[ModelSource] {
        &self.sources
    }

    /// Apply-time statistic of every source for one row.
    pub fn ts_values(&self, categorical: &[u32]) -> Result<Vec<f64>> {
        if categorical.len() != self.layout.categorical.len() {
            return Err(Error::Schema(format!(
                "row has {} categorical features, model expects {}",
                categorical.len(),
                self.layout.categorical.len()
            )));
        }
        let mut key = Vec::new();
        Ok(self
            .sources
            .iter()
            .zip(&self.combinations)
            .map(|(s, combo)| {
                let id = match combo {
                    None => categorical[s.features[0] as usize],
                    Some(index) => {
                        key.clear();
                        key.extend(s.features.iter().map(|&f| categorical[f as usize]));
                        index.lookup(&key).unwrap_or(u32::MAX)
                    }
                };
                s.table.value(id)
            })
            .collect())
    }

    pub fn predict_row(&self, numeric: &[f64], categorical: &[u32]) -> Result<f64> {
        if numeric.len() != self.layout.numeric.len() {
            return Err(Error::Schema(format!(
                "row has {} numerical features, model expects {}",
                numeric.len(),
                self.layout.numeric.len()
            )));
        }
        let ts = self.ts_values(categorical)?;
        let ctx = TsContext::Apply(&ts);
        let lr = self.params.learning_rate;
        let mut score = 0.0;
        for e in &self.trees {
            score += lr * e.leaf_values[get_leaf(&e.tree, numeric, &ctx)?];
        }
        Ok(score)
    }

    /// Checks that a dataset has this model's feature layout.
    pub fn check_layout(&self, data: &Dataset) -> Result<()> {
        let l = data.layout();
        let cat_names = |c: &ColumnLayout| c.categorical.iter().map(|f| f.name.clone()).collect::<Vec<_>>();
        if l.numeric != self.layout.numeric || cat_names(l) != cat_names(&self.layout) {
            return Err(Error::Schema("dataset features do not match the model".into()));
        }
        Ok(())
    }

    /// Raw scores for every row.
    pub fn predict(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.check_layout(data)?;
        (0..data.n_rows())
            .into_par_iter()
            .map(|r| self.predict_row(&data.numeric_row(r), &data.categorical_row(r)))
            .collect()
    }

    /// Probabilities `sigmoid(score)` of a logloss model.
    pub fn predict_proba(&self, data: &Dataset) -> Result<Vec<f64>> {
        if self.params.loss != Loss::Logloss {
            return Err(Error::invalid("probabilities require a logloss model"));
        }
        Ok(self.predict(data)?.into_iter().map(sigmoid).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
