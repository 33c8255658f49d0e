//! Multiclass gradient boosting with softmax residual trees.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::flowdata::FeatureMatrix;
use crate::learners::tree::ColumnStore;
use crate::learners::RegressionTree;
use crate::numcore::softmax_rows;
use crate::{Classifier, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoostPreset {
    /// lr 0.1, depth 3, 100 rounds, no leaf shrinkage.
    #[default]
    Gb,
    /// lr 0.1, depth 6, 100 rounds, leaf shrinkage λ = 1.
    Xgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub l2_leaf: f64,
}

impl BoostPreset {
    pub fn config(self) -> BoostConfig {
        match self {
            BoostPreset::Gb => BoostConfig { rounds: 100, learning_rate: 0.1, max_depth: 3, l2_leaf: 0.0 },
            BoostPreset::Xgb => BoostConfig { rounds: 100, learning_rate: 0.1, max_depth: 6, l2_leaf: 1.0 },
        }
    }
}

/// One round holds one regression tree per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBoostClassifier {
    pub stages: Vec<Vec<RegressionTree>>,
    pub learning_rate: f64,
    pub n_features: usize,
    pub n_classes: usize,
    /// Mean training log-loss before the first round and after each round.
    pub train_loss: Vec<f64>,
}

fn mean_log_loss(p: &Array2<f64>, y: &[usize]) -> f64 {
    y.iter().enumerate().map(|(i, &k)| -p[[i, k]].max(f64::MIN_POSITIVE).ln()).sum::<f64>() / y.len() as f64
}

impl GradientBoostClassifier {
    pub fn fit(train: &FeatureMatrix, cfg: &BoostConfig) -> Result<Self> {
        let (n, c) = (train.n_samples(), train.n_classes());
        if n < 2 {
            return Err(Error::Precondition("gradient boosting needs at least 2 rows".into()));
        }
        if !(cfg.learning_rate > 0.0) || !(cfg.l2_leaf >= 0.0) {
            return Err(Error::Config("gradient boosting: learning_rate must be > 0 and l2_leaf >= 0".into()));
        }
        let store = ColumnStore::new(train.x());
        let x = train.x();
        let y = train.y();
        let mut f = Array2::<f64>::zeros((n, c));
        let mut p = softmax_rows(f.view());
        let mut train_loss = vec![mean_log_loss(&p, y)];
        let mut stages = Vec::with_capacity(cfg.rounds);

        for _ in 0..cfg.rounds {
            let trees: Vec<RegressionTree> = (0..c)
                .into_par_iter()
                .map(|k| {
                    let residual: Vec<f64> =
                        (0..n).map(|i| if y[i] == k { 1.0 } else { 0.0 } - p[[i, k]]).collect();
                    RegressionTree::fit_on_store(&store, &residual, Some(cfg.max_depth), cfg.l2_leaf)
                })
                .collect();
            for (k, t) in trees.iter().enumerate() {
                for i in 0..n {
                    f[[i, k]] += cfg.learning_rate * t.predict_row(x.row(i));
                }
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence("gradient boosting scores became non-finite".into()));
            }
            p = softmax_rows(f.view());
            train_loss.push(mean_log_loss(&p, y));
            stages.push(trees);
        }
        Ok(GradientBoostClassifier {
            stages,
            learning_rate: cfg.learning_rate,
            n_features: train.n_features(),
            n_classes: c,
            train_loss,
        })
    }

    /// Raw per-class scores `F`.
    pub fn decision_function(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        crate::model::check_width(self.n_features, x)?;
        let mut f = Array2::zeros((x.nrows(), self.n_classes));
        for stage in &self.stages {
            for (k, t) in stage.iter().enumerate() {
                for (i, row) in x.outer_iter().enumerate() {
                    f[[i, k]] += self.learning_rate * t.predict_row(row);
                }
            }
        }
        Ok(f)
    }
}

impl Classifier for GradientBoostClassifier {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        Ok(softmax_rows(self.decision_function(x)?.view()))
    }
}
