//! The boosting loop.
//!
//! Each iteration draws bootstrap weights, samples a permutation `r` in
//! `1..=s`, grows an oblivious tree greedily under the cosine criterion, then
//! updates every supporting model and the leaf-value model `M_0`, whose
//! leaves are computed under permutation `0`.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use crate::boosting::bootstrap::tree_weights;
use crate::boosting::combinations::{build_combinations, CombinationIndex, SourceRegistry};
use crate::boosting::gradient::checked_gradient;
use crate::boosting::model::{ModelSource, TrainedModel};
use crate::boosting::params::{BoostParams, Loss, Mode};
use crate::boosting::scoring::{OrderedContext, PlainContext};
use crate::boosting::supporting::{gradient_level, leaf_averages, OrderedModels};
use crate::dataset::{gen_permutations, quantize, BorderSet, Dataset, Permutation};
use crate::error::{Error, Result};
use crate::random::{self, Domain};
use crate::target_stats::{
    greedy_encode, holdout_encode_with, holdout_partition, leave_one_out_encode, ordered_encode, TsConfig, TsMode,
    TsScope, TsTable,
};
use crate::tree::{ObliviousTree, SplitAttribute, SplitSource};

/// Per-iteration training record.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainLog {
    /// Mean loss of `M_0` on the boosting rows after each iteration.
    pub train_loss: Vec<f64>,
    /// Final `M_0` values, aligned with `rows`.
    pub final_scores: Vec<f64>,
    /// Dataset rows used for boosting.
    pub rows: Vec<usize>,
}

pub fn train(data: &Dataset, params: &BoostParams) -> Result<TrainedModel> {
    Ok(train_with_log(data, params)?.0)
}

pub fn train_with_log(data: &Dataset, params: &BoostParams) -> Result<(TrainedModel, TrainLog)> {
    let mut t = Trainer::new(data, params.clone())?;
    for _ in 0..params.iterations {
        t.step()?;
    }
    let log = TrainLog {
        train_loss: t.loss_trace.clone(),
        final_scores: t.m0.clone(),
        rows: t.rows.clone(),
    };
    Ok((t.into_model()?, log))
}

struct Column {
    values: Vec<f64>,
    borders: BorderSet,
    bins: Vec<u16>,
}

impl Column {
    fn new(values: Vec<f64>, border_count: usize) -> Result<Self> {
        let borders = quantize(&values, border_count)?;
        let bins = values.iter().map(|&v| borders.bin(v)).collect();
        Ok(Self { values, borders, bins })
    }
}

/// Category ids of a source over all dataset rows.
struct SourceCategories {
    ids: Vec<u32>,
    cardinality: usize,
    combination: Option<CombinationIndex>,
}

enum Models {
    /// `values[r - 1][example]`.
    Plain(Vec<Vec<f64>>),
    Ordered(OrderedModels),
}

pub struct Trainer<'a> {
    data: &'a Dataset,
    params: BoostParams,
    ts_config: TsConfig,
    rows: Vec<usize>,
    stat_rows: Vec<usize>,
    targets: Vec<f64>,
    perms: Vec<Permutation>,
    cat_perms: Vec<Permutation>,
    numeric: Vec<Column>,
    registry: SourceRegistry,
    categories: Vec<SourceCategories>,
    ts: HashMap<(u32, usize), Column>,
    models: Models,
    m0: Vec<f64>,
    trees: Vec<(ObliviousTree, Vec<f64>)>,
    loss_trace: Vec<f64>,
}

impl<'a> Trainer<'a> {
    pub fn new(data: &'a Dataset, params: BoostParams) -> Result<Self> {
        params.validate()?;
        if data.n_rows() == 0 {
            return Err(Error::invalid("cannot train on an empty dataset"));
        }
        if params.loss == Loss::Logloss && data.targets().iter().any(|&y| !(0.0..=1.0).contains(&y)) {
            return Err(Error::invalid("logloss targets must lie in [0, 1]"));
        }
        let prior = params.prior.unwrap_or_else(|| data.mean_target());
        let ts_config = TsConfig::new(params.ts_mode, params.prior_weight, prior)?;

        let (stat_rows, rows) = if params.ts_mode == TsMode::Holdout && data.n_categorical() > 0 {
            holdout_partition(data.n_rows(), params.seed)?
        } else {
            (Vec::new(), (0..data.n_rows()).collect())
        };
        let n = rows.len();
        let s = params.permutations;
        let targets: Vec<f64> = rows.iter().map(|&r| data.targets()[r]).collect();
        let perms = gen_permutations(n, s, params.seed)?;
        let cat_perms = if params.couple_permutations {
            perms.clone()
        } else {
            (0..=s as u64)
                .map(|k| Permutation::random_in(n, params.seed, Domain::CatPermutation, k))
                .collect()
        };
        let numeric = (0..data.n_numeric())
            .map(|f| Column::new(rows.iter().map(|&r| data.numeric(f)[r]).collect(), params.border_count))
            .collect::<Result<Vec<_>>>()?;
        let categories = (0..data.n_categorical())
            .map(|f| SourceCategories {
                ids: data.categorical(f).to_vec(),
                cardinality: data.cardinality(f),
                combination: None,
            })
            .collect();
        let models = match params.mode {
            Mode::Plain => Models::Plain(vec![vec![0.0; n]; s]),
            Mode::Ordered => Models::Ordered(OrderedModels::new(n, s)),
        };
        Ok(Self {
            data,
            ts_config,
            rows,
            stat_rows,
            targets,
            perms,
            cat_perms,
            numeric,
            registry: SourceRegistry::with_singletons(data.n_categorical()),
            categories,
            ts: HashMap::new(),
            models,
            m0: vec![0.0; n],
            trees: Vec::new(),
            loss_trace: Vec::new(),
            params,
        })
    }

    /// Number of boosting rows.
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn params(&self) -> &BoostParams {
        &self.params
    }

    /// Dataset rows used for boosting; all rows unless holdout statistics
    /// reserve part of the data.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// `sigma_0 ..= sigma_s` over the boosting rows.
    pub fn permutations(&self) -> &[Permutation] {
        &self.perms
    }

    /// Permutations used for ordered target statistics.
    pub fn ts_permutations(&self) -> &[Permutation] {
        &self.cat_perms
    }

    pub fn ordered_models(&self) -> Option<&OrderedModels> {
        match &self.models {
            Models::Ordered(m) => Some(m),
            Models::Plain(_) => None,
        }
    }

    /// Plain-mode supporting model `M_r` by example, `r` in `1..=s`.
    pub fn plain_model(&self, r: usize) -> Option<&[f64]> {
        match &self.models {
            Models::Plain(m) => Some(&m[r - 1]),
            Models::Ordered(_) => None,
        }
    }

    /// The leaf-value model `M_0` by boosting row.
    pub fn leaf_model(&self) -> &[f64] {
        &self.m0
    }

    pub fn trees(&self) -> &[(ObliviousTree, Vec<f64>)] {
        &self.trees
    }

    pub fn registry(&self) -> &SourceRegistry {
        &self.registry
    }

    pub fn loss_trace(&self) -> &[f64] {
        &self.loss_trace
    }

    /// Number of predictions currently maintained, including `M_0`.
    pub fn maintained_predictions(&self) -> usize {
        self.m0.len()
            + match &self.models {
                Models::Plain(m) => m.iter().map(Vec::len).sum(),
                Models::Ordered(m) => m.stored_count(),
            }
    }

    /// Training encoding of a target-statistic source under permutation `r`.
    pub fn ts_values(&mut self, source: u32, r: usize) -> Result<&[f64]> {
        let key = self.ensure_ts(source, r)?;
        Ok(&self.ts[&key].values)
    }

    pub fn step(&mut self) -> Result<()> {
        let t = self.trees.len() as u64;
        let weights = self.weights(t)?;
        let s = self.params.permutations;
        let r = if s == 1 {
            1
        } else {
            random::stream(self.params.seed, Domain::TreeSampling, t).gen_range(1..=s)
        };
        let tree = self.select_structure(r, &weights)?;
        self.apply_structure(tree, &weights)
    }

    /// Runs one iteration with a fixed tree structure.
    pub fn fit_tree(&mut self, tree: ObliviousTree) -> Result<()> {
        let weights = self.weights(self.trees.len() as u64)?;
        for split in tree.splits() {
            self.check_split(split)?;
        }
        self.apply_structure(tree, &weights)
    }

    /// Ordered-mode `Delta(k)` by position of permutation `r` for the leaves
    /// of `tree`, from the current supporting models and the next tree's weights.
    pub fn ordered_deltas(&mut self, r: usize, tree: &ObliviousTree) -> Result<Vec<f64>> {
        let weights = self.weights(self.trees.len() as u64)?;
        let leaves = self.leaves(tree, r)?;
        let order = self.perms[r].order().to_vec();
        let leaves_pos: Vec<u32> = order.iter().map(|&e| leaves[e as usize]).collect();
        let (levels, target, w_pos) = self.ordered_inputs(r, &weights)?;
        let ctx = OrderedContext {
            level_gradients: &levels,
            target: &target,
            weights: &w_pos,
            leaves: &leaves_pos,
            n_leaves: tree.leaf_count(),
            kept_from: 0,
        };
        Ok(ctx.deltas(&leaves_pos, tree.leaf_count()))
    }

    fn weights(&self, tree: u64) -> Result<Vec<f64>> {
        tree_weights(self.n(), self.params.bootstrap_temperature, self.params.seed, tree)
    }

    fn check_split(&self, split: &SplitAttribute) -> Result<()> {
        match split.source {
            SplitSource::Numeric { feature } if (feature as usize) < self.numeric.len() => Ok(()),
            SplitSource::Ts { source } if (source as usize) < self.registry.len() => Ok(()),
            other => Err(Error::Model(format!("split on unknown source {other:?}"))),
        }
    }

    fn ensure_categories(&mut self, source: u32) {
        while self.categories.len() <= source as usize {
            let id = self.categories.len() as u32;
            let columns: Vec<&[u32]> = self
                .registry
                .features(id)
                .iter()
                .map(|&f| self.data.categorical(f as usize))
                .collect();
            let (index, ids) = CombinationIndex::build(&columns);
            self.categories.push(SourceCategories {
                ids,
                cardinality: index.len(),
                combination: Some(index),
            });
        }
    }

    fn ensure_ts(&mut self, source: u32, r: usize) -> Result<(u32, usize)> {
        let key = (source, if self.params.ts_mode == TsMode::Ordered { r } else { 0 });
        if self.ts.contains_key(&key) {
            return Ok(key);
        }
        self.ensure_categories(source);
        let cats = &self.categories[source as usize];
        let local: Vec<u32> = self.rows.iter().map(|&row| cats.ids[row]).collect();
        let cfg = &self.ts_config;
        let values = match self.params.ts_mode {
            TsMode::Ordered => ordered_encode(&local, &self.targets, cfg, &self.cat_perms[r])?.values,
            TsMode::Greedy => greedy_encode(&local, &self.targets, cfg)?.values,
            TsMode::LeaveOneOut => leave_one_out_encode(&local, &self.targets, cfg)?.values,
            TsMode::Holdout => {
                holdout_encode_with(&cats.ids, self.data.targets(), cfg, self.stat_rows.clone(), self.rows.clone())?
                    .values
            }
        };
        self.ts.insert(key, Column::new(values, self.params.ts_border_count)?);
        Ok(key)
    }

    fn column(&self, source: SplitSource, r: usize) -> &Column {
        match source {
            SplitSource::Numeric { feature } => &self.numeric[feature as usize],
            SplitSource::Ts { source } => {
                let r = if self.params.ts_mode == TsMode::Ordered { r } else { 0 };
                &self.ts[&(source, r)]
            }
        }
    }

    /// Leaves of every boosting row under permutation `r`.
    fn leaves(&mut self, tree: &ObliviousTree, r: usize) -> Result<Vec<u32>> {
        for split in tree.splits() {
            if let SplitSource::Ts { source } = split.source {
                self.ensure_ts(source, r)?;
            }
        }
        let mut leaves = vec![0u32; self.n()];
        for (level, split) in tree.splits().iter().enumerate() {
            let col = self.column(split.source, r);
            for (leaf, &v) in leaves.iter_mut().zip(&col.values) {
                if v > split.threshold {
                    *leaf |= 1 << level;
                }
            }
        }
        Ok(leaves)
    }

    /// Candidate sources at the current level: numerical features, then
    /// target-statistic sources in registry order.
    fn candidate_sources(&mut self, combos: &[u32], r: usize) -> Result<Vec<SplitSource>> {
        let mut out: Vec<SplitSource> = (0..self.numeric.len() as u32)
            .map(|feature| SplitSource::Numeric { feature })
            .collect();
        let mut ts: Vec<u32> = (0..self.data.n_categorical() as u32).chain(combos.iter().copied()).collect();
        ts.sort_unstable();
        ts.dedup();
        for source in ts {
            self.ensure_ts(source, r)?;
            out.push(SplitSource::Ts { source });
        }
        Ok(out)
    }

    fn ordered_inputs(&self, r: usize, weights: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
        let Models::Ordered(models) = &self.models else {
            return Err(Error::invalid("ordered inputs requested in plain mode"));
        };
        let order = self.perms[r].order();
        let y_pos: Vec<f64> = order.iter().map(|&e| self.targets[e as usize]).collect();
        let w_pos: Vec<f64> = order.iter().map(|&e| weights[e as usize]).collect();
        let levels = (0..models.levels())
            .map(|j| models.level_gradients(r, j, self.params.loss, &y_pos))
            .collect::<Result<Vec<_>>>()?;
        let target = (0..order.len())
            .map(|k| match gradient_level(k) {
                None => Ok(self.params.loss.gradient(0.0, y_pos[0])),
                Some(j) => Ok(levels[j][k]),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((levels, target, w_pos))
    }

    fn select_structure(&mut self, r: usize, weights: &[f64]) -> Result<ObliviousTree> {
        let n = self.n();
        let discard = self.params.discard_count(n);
        let mut splits = Vec::new();
        let mut used = Vec::new();
        let mut combos = Vec::new();

        enum Inputs {
            Plain { gradients: Vec<f64>, kept: Vec<bool> },
            Ordered { levels: Vec<Vec<f64>>, target: Vec<f64>, w_pos: Vec<f64> },
        }
        let inputs = match &self.models {
            Models::Plain(m) => Inputs::Plain {
                gradients: m[r - 1]
                    .iter()
                    .zip(&self.targets)
                    .map(|(&s, &y)| checked_gradient(self.params.loss, s, y))
                    .collect::<Result<_>>()?,
                kept: (0..n).map(|i| self.perms[r].position(i) >= discard).collect(),
            },
            Models::Ordered(_) => {
                let (levels, target, w_pos) = self.ordered_inputs(r, weights)?;
                Inputs::Ordered { levels, target, w_pos }
            }
        };
        // Leaves by example (Plain) or by position (Ordered).
        let mut leaves = vec![0u32; n];
        let order = self.perms[r].order().to_vec();

        for level in 0..self.params.depth {
            let sources = self.candidate_sources(&combos, r)?;
            let columns: Vec<&Column> = sources.iter().map(|&s| self.column(s, r)).collect();
            let scores: Vec<Vec<Option<f64>>> = match &inputs {
                Inputs::Plain { gradients, kept } => {
                    let ctx = PlainContext {
                        gradients,
                        weights,
                        leaves: &leaves,
                        kept,
                        n_leaves: 1 << level,
                    };
                    let norm = ctx.gradient_norm();
                    columns
                        .par_iter()
                        .map(|c| ctx.column_scores(&c.bins, c.borders.len(), norm))
                        .collect()
                }
                Inputs::Ordered { levels, target, w_pos } => {
                    let ctx = OrderedContext {
                        level_gradients: levels,
                        target,
                        weights: w_pos,
                        leaves: &leaves,
                        n_leaves: 1 << level,
                        kept_from: discard,
                    };
                    let norm = ctx.gradient_norm();
                    columns
                        .iter()
                        .map(|c| {
                            let bins: Vec<u16> = order.iter().map(|&e| c.bins[e as usize]).collect();
                            ctx.column_scores(&bins, c.borders.len(), norm)
                        })
                        .collect()
                }
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for (c, col_scores) in scores.iter().enumerate() {
                for (b, score) in col_scores.iter().enumerate() {
                    if let Some(v) = *score {
                        if best.map_or(true, |(bv, _, _)| v < bv) {
                            best = Some((v, c, b));
                        }
                    }
                }
            }
            let Some((_, c, b)) = best else { break };
            let column = columns[c];
            let split = SplitAttribute {
                source: sources[c],
                threshold: column.borders.borders()[b],
            };
            let bit = 1u32 << level;
            match &inputs {
                Inputs::Plain { .. } => {
                    for (leaf, &bin) in leaves.iter_mut().zip(&column.bins) {
                        if bin as usize > b {
                            *leaf |= bit;
                        }
                    }
                }
                Inputs::Ordered { .. } => {
                    for (leaf, &e) in leaves.iter_mut().zip(&order) {
                        if column.bins[e as usize] as usize > b {
                            *leaf |= bit;
                        }
                    }
                }
            }
            splits.push(split);
            if let SplitSource::Ts { source } = split.source {
                if !used.contains(&source) {
                    used.push(source);
                }
                combos = build_combinations(
                    &used,
                    self.data.n_categorical(),
                    self.params.max_combination,
                    &mut self.registry,
                );
            }
        }
        ObliviousTree::new(splits)
    }

    fn apply_structure(&mut self, tree: ObliviousTree, weights: &[f64]) -> Result<()> {
        let n_leaves = tree.leaf_count();
        let lr = self.params.learning_rate;
        let loss = self.params.loss;
        for r in 1..=self.params.permutations {
            let leaves = self.leaves(&tree, r)?;
            match &mut self.models {
                Models::Plain(models) => {
                    let m = &mut models[r - 1];
                    let g = m
                        .iter()
                        .zip(&self.targets)
                        .map(|(&s, &y)| checked_gradient(loss, s, y))
                        .collect::<Result<Vec<_>>>()?;
                    let avg = leaf_averages(&g, &leaves, weights, n_leaves);
                    for (v, &leaf) in m.iter_mut().zip(&leaves) {
                        *v -= lr * avg[leaf as usize];
                    }
                }
                Models::Ordered(models) => {
                    let order = self.perms[r].order();
                    let leaves_pos: Vec<u32> = order.iter().map(|&e| leaves[e as usize]).collect();
                    let w_pos: Vec<f64> = order.iter().map(|&e| weights[e as usize]).collect();
                    let y_pos: Vec<f64> = order.iter().map(|&e| self.targets[e as usize]).collect();
                    models.update(r, &leaves_pos, &w_pos, &y_pos, n_leaves, loss, lr)?;
                }
            }
        }

        let leaves = self.leaves(&tree, 0)?;
        let g0 = self
            .m0
            .iter()
            .zip(&self.targets)
            .map(|(&s, &y)| checked_gradient(loss, s, y))
            .collect::<Result<Vec<_>>>()?;
        let b: Vec<f64> = leaf_averages(&g0, &leaves, weights, n_leaves)
            .into_iter()
            .map(|a| 0.0 - a)
            .collect();
        for (m, &leaf) in self.m0.iter_mut().zip(&leaves) {
            *m += lr * b[leaf as usize];
        }
        self.loss_trace.push(loss.mean(&self.m0, &self.targets));
        self.trees.push((tree, b));
        Ok(())
    }

    /// Builds the apply-time model: full-data statistics for every
    /// registered source (the statistics part only for holdout statistics).
    pub fn into_model(mut self) -> Result<TrainedModel> {
        for source in 0..self.registry.len() as u32 {
            self.ensure_categories(source);
        }
        let (stat_rows, scope) = if self.params.ts_mode == TsMode::Holdout && !self.stat_rows.is_empty() {
            (&self.stat_rows, TsScope::Holdout)
        } else {
            (&self.rows, TsScope::Full)
        };
        let sources = self
            .registry
            .sources()
            .iter()
            .zip(&self.categories)
            .map(|(features, cats)| ModelSource {
                features: features.clone(),
                table: TsTable::from_rows(
                    &cats.ids,
                    self.data.targets(),
                    stat_rows.iter().copied(),
                    cats.cardinality,
                    &self.ts_config,
                    scope,
                ),
                tuples: cats
                    .combination
                    .as_ref()
                    .map(|c| c.tuples().to_vec())
                    .unwrap_or_default(),
            })
            .collect();
        TrainedModel::new(
            self.params.clone(),
            self.data.layout().clone(),
            self.ts_config.prior,
            sources,
            self.trees,
        )
    }
}
