use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::flowdata::FeatureMatrix;
use crate::learners::tree::ColumnStore;
use crate::learners::{DecisionTree, MaxFeatures, TreeConfig};
use crate::{seed, Classifier, Error, Model, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_estimators: 100,
            max_depth: Some(10),
            min_samples_split: 2,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            seed: 42,
        }
    }
}

/// `n` draws with replacement from `0..n`.
pub fn bootstrap_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Soft-voting forest of CART trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub n_features: usize,
    pub n_classes: usize,
}

impl RandomForest {
    /// Seed of tree `i`'s bootstrap stream.
    pub fn resample_seed(cfg: &ForestConfig, i: usize) -> u64 {
        seed::derive_indexed(cfg.seed, i as u64)
    }

    pub fn fit(train: &FeatureMatrix, cfg: &ForestConfig) -> Result<Self> {
        let n = train.n_samples();
        if cfg.n_estimators == 0 {
            return Err(Error::Config("random forest needs n_estimators >= 1".into()));
        }
        if n < 2 {
            return Err(Error::Precondition("random forest needs at least 2 rows".into()));
        }
        let store = ColumnStore::new(train.x());
        let trees = (0..cfg.n_estimators)
            .into_par_iter()
            .map(|i| {
                let s = Self::resample_seed(cfg, i);
                let mut weights = vec![0.0; n];
                if cfg.bootstrap {
                    for r in bootstrap_indices(n, s) {
                        weights[r] += 1.0;
                    }
                } else {
                    weights.fill(1.0);
                }
                let tree_cfg = TreeConfig {
                    max_depth: cfg.max_depth,
                    min_samples_split: cfg.min_samples_split,
                    max_features: cfg.max_features,
                    seed: seed::derive_named(s, "features"),
                };
                DecisionTree::fit_on_store(&store, train.y(), train.n_classes(), &weights, &tree_cfg)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RandomForest { trees, n_features: train.n_features(), n_classes: train.n_classes() })
    }
}

impl Classifier for RandomForest {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut acc = Array2::zeros((x.nrows(), self.n_classes));
        for t in &self.trees {
            acc += &t.predict_proba(x)?;
        }
        acc /= self.trees.len() as f64;
        Ok(acc)
    }
}

pub fn fit_random_forest(train: &FeatureMatrix, cfg: &ForestConfig) -> Result<Model> {
    Ok(Model::RandomForest(RandomForest::fit(train, cfg)?))
}
