//! Classifiers and training utilities, written from scratch so every number
//! is reproducible under a seed: stratified splitting, SMOTE, a feed-forward
//! network for feature vectors, a small CNN for spectrograms, decision trees,
//! random forests, metrics and permutation importance.

pub mod ann;
pub mod cnn;
pub mod dense;
pub mod error;
pub mod forest;
pub mod history;
pub mod importance;
pub mod metrics;
pub mod model;
pub mod nn;
pub mod norm;
pub mod smote;
pub mod split;
pub mod synthetic;
pub mod tree;

#[cfg(test)]
mod testutil;

pub use ann::{ann_train, AnnConfig, AnnModel};
pub use cnn::{cnn_train, prepare_input, CnnConfig, CnnModel};
pub use error::{LearnError, Result};
pub use forest::{forest_train, ForestConfig, ForestModel};
pub use history::{read_history_csv, write_history_csv, EpochRecord};
pub use importance::{permutation_importance, FeatureImportance};
pub use metrics::{classification_report, Confusion, Report};
pub use model::{load_model, save_model, Classifier, Model, ModelBundle, ModelKind};
pub use nn::bce_loss;
pub use norm::NormStats;
pub use smote::{smote, SmoteOutput, SyntheticRecord};
pub use split::train_test_split;
pub use tree::{tree_train, TreeConfig, TreeModel};
