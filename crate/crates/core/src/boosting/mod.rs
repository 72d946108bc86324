//! Gradient boosting over oblivious trees in Plain and Ordered modes.

pub mod bootstrap;
pub mod combinations;
pub mod gradient;
pub mod model;
pub mod naive;
pub mod params;
pub mod scoring;
pub mod supporting;
pub mod trainer;

pub use bootstrap::{bootstrap_weights, tree_weights};
pub use combinations::{build_combinations, SourceRegistry};
pub use gradient::calc_gradient;
pub use model::TrainedModel;
pub use naive::{train_ordered_naive, NaiveOrderedModels, Stump};
pub use params::{BoostParams, Loss, Mode};
pub use supporting::{maintained_predictions, OrderedModels};
pub use trainer::{train, train_with_log, TrainLog, Trainer};
