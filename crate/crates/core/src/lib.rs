//! Ordered boosting over oblivious decision trees with ordered target
//! statistics for categorical features, plus an exact and Monte Carlo harness
//! for studying prediction shift.

pub mod boosting;
pub mod dataset;
pub mod error;
pub mod metrics;
pub mod random;
pub mod shift_lab;
pub mod synth;
pub mod target_stats;
pub mod tree;

pub use boosting::{train, train_ordered_naive, BoostParams, Loss, Mode, TrainedModel, Trainer};
pub use dataset::{
    gen_permutations, load_csv, load_csv_aligned, quantize, split, BorderSet, ColumnKind, ColumnLayout, Dataset,
    FeatureSchema, MissingPolicy, Permutation, SchemaColumn,
};
pub use error::{Error, Result};
pub use metrics::{eval_metrics, MetricReport};
pub use target_stats::{TsConfig, TsMode, TsTable};
pub use tree::{ObliviousTree, SplitAttribute, SplitSource};
