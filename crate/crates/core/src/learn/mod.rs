//! Supervised learning and evaluation: CART trees, random forests,
//! stratified folds, ROC analysis, and the 2×2 χ² test.

mod chi2;
mod cv;
mod forest;
mod matrix;
pub mod metrics;
mod tree;

pub use chi2::{chi2_p, chi2_test};
pub use cv::stratified_kfold;
pub use forest::{train_forest, train_forest_with, ForestConfig, ForestModel, FOREST_MODEL_VERSION};
pub use matrix::TrainingMatrix;
pub use metrics::{accuracy, roc_auc, roc_curve, RocCurve, RocPoint};
pub use tree::{DecisionTree, Node};
