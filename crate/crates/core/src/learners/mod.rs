//! The four base classifiers.

pub mod knn;
pub mod logistic;
pub mod mlp;
pub mod tree;

use serde::{Deserialize, Serialize};

pub use knn::{fit_knn, KnnClassifier, KnnConfig};
pub use logistic::{fit_logistic_regression, logistic_loss_and_grad, LogisticConfig, LogisticRegression};
pub use mlp::{fit_mlp, mlp_loss_and_grad, mlp_param_count, MlpClassifier, MlpConfig, MlpParams};
pub use tree::{fit_decision_tree, DecisionTree, MaxFeatures, RegressionTree, TreeConfig, TreeNode};

use crate::ensembles::{fit_random_forest, ForestConfig};
use crate::flowdata::FeatureMatrix;
use crate::{Model, Result};

/// A base-learner configuration as written in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    DecisionTree(TreeConfig),
    LogisticRegression(LogisticConfig),
    Knn(KnnConfig),
    Mlp(MlpConfig),
    /// Forests may also serve as members of other ensembles.
    RandomForest(ForestConfig),
}

impl LearnerSpec {
    pub fn fit(&self, train: &FeatureMatrix) -> Result<Model> {
        match self {
            LearnerSpec::DecisionTree(c) => fit_decision_tree(train, c),
            LearnerSpec::LogisticRegression(c) => fit_logistic_regression(train, c),
            LearnerSpec::Knn(c) => fit_knn(train, c),
            LearnerSpec::Mlp(c) => fit_mlp(train, c),
            LearnerSpec::RandomForest(c) => fit_random_forest(train, c),
        }
    }

    /// Same learner with its random stream replaced (KNN has none).
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut s = self.clone();
        match &mut s {
            LearnerSpec::DecisionTree(c) => c.seed = seed,
            LearnerSpec::LogisticRegression(c) => c.seed = seed,
            LearnerSpec::Knn(_) => {}
            LearnerSpec::Mlp(c) => c.seed = seed,
            LearnerSpec::RandomForest(c) => c.seed = seed,
        }
        s
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LearnerSpec::DecisionTree(_) => "decision_tree",
            LearnerSpec::LogisticRegression(_) => "logistic_regression",
            LearnerSpec::Knn(_) => "knn",
            LearnerSpec::Mlp(_) => "mlp",
            LearnerSpec::RandomForest(_) => "random_forest",
        }
    }

    pub fn decision_tree() -> Self {
        LearnerSpec::DecisionTree(TreeConfig::default())
    }

    pub fn logistic_regression() -> Self {
        LearnerSpec::LogisticRegression(LogisticConfig::default())
    }

    pub fn knn() -> Self {
        LearnerSpec::Knn(KnnConfig::default())
    }

    pub fn mlp() -> Self {
        LearnerSpec::Mlp(MlpConfig::default())
    }

    pub fn random_forest() -> Self {
        LearnerSpec::RandomForest(ForestConfig::default())
    }
}
