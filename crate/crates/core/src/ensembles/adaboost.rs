//! Multiclass AdaBoost (SAMME) over shallow CART trees.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::flowdata::FeatureMatrix;
use crate::learners::tree::ColumnStore;
use crate::learners::{DecisionTree, TreeConfig};
use crate::numcore::softmax_rows;
use crate::{Classifier, Error, Result};

/// Error floor used for the stage weight of a perfect stage.
pub const PERFECT_STAGE_EPSILON: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostClassifier {
    pub stumps: Vec<DecisionTree>,
    pub alphas: Vec<f64>,
    pub n_features: usize,
    pub n_classes: usize,
}

/// Per-round bookkeeping of a boosting run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdaBoostTrace {
    /// Sample weights entering each round (round 0 is uniform), plus the
    /// weights after the last kept round.
    pub weights: Vec<Vec<f64>>,
    pub errors: Vec<f64>,
    pub alphas: Vec<f64>,
}

impl AdaBoostClassifier {
    pub fn fit(train: &FeatureMatrix, rounds: usize, max_depth: usize) -> Result<Self> {
        Ok(Self::fit_traced(train, rounds, max_depth)?.0)
    }

    pub fn fit_traced(train: &FeatureMatrix, rounds: usize, max_depth: usize) -> Result<(Self, AdaBoostTrace)> {
        let n = train.n_samples();
        let c = train.n_classes();
        if c < 2 || n < 2 {
            return Err(Error::Precondition("adaboost needs at least 2 classes and 2 rows".into()));
        }
        if rounds == 0 {
            return Err(Error::Config("adaboost needs n_estimators >= 1".into()));
        }
        let store = ColumnStore::new(train.x());
        let cfg = TreeConfig { max_depth: Some(max_depth), ..TreeConfig::default() };
        let y = train.y();
        let mut w = vec![1.0 / n as f64; n];
        let mut trace = AdaBoostTrace::default();
        let mut stumps = Vec::new();
        let mut alphas = Vec::new();
        let chance = 1.0 - 1.0 / c as f64;

        for round in 0..rounds {
            trace.weights.push(w.clone());
            let stump = DecisionTree::fit_on_store(&store, y, c, &w, &cfg)?;
            let pred = stump.predict(train.x())?;
            let total: f64 = w.iter().sum();
            let wrong: f64 = (0..n).filter(|&i| pred[i] != y[i]).map(|i| w[i]).sum();
            let eps = wrong / total;
            trace.errors.push(eps);
            if eps >= chance {
                if round == 0 {
                    return Err(Error::DegenerateBoost { error: eps, stump: Box::new(stump) });
                }
                trace.weights.pop();
                break;
            }
            let perfect = eps <= 0.0;
            let e = eps.max(PERFECT_STAGE_EPSILON);
            let alpha = ((1.0 - e) / e).ln() + ((c - 1) as f64).ln();
            stumps.push(stump);
            alphas.push(alpha);
            trace.alphas.push(alpha);
            if perfect {
                break;
            }
            let boost = alpha.exp();
            for i in 0..n {
                if pred[i] != y[i] {
                    w[i] *= boost;
                }
            }
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
        }
        trace.weights.push(w);
        let model = AdaBoostClassifier { stumps, alphas, n_features: train.n_features(), n_classes: c };
        Ok((model, trace))
    }

    /// `Σ_t α_t [h_t(x) = k]` per row and class.
    pub fn decision_function(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut votes = Array2::zeros((x.nrows(), self.n_classes));
        for (s, &a) in self.stumps.iter().zip(&self.alphas) {
            for (r, k) in s.predict(x)?.into_iter().enumerate() {
                votes[[r, k]] += a;
            }
        }
        Ok(votes)
    }
}

impl Classifier for AdaBoostClassifier {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut v = self.decision_function(x)?;
        let norm: f64 = self.alphas.iter().sum::<f64>() * (self.n_classes - 1) as f64;
        v /= norm;
        Ok(softmax_rows(v.view()))
    }
}
