use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::forest::bootstrap_indices;
use crate::flowdata::FeatureMatrix;
use crate::learners::LearnerSpec;
use crate::{seed, Classifier, Error, Model, Result};

/// Bootstrap-aggregated members, averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaggingClassifier {
    pub members: Vec<Model>,
    /// Learner kind of each member, in order.
    pub base_kinds: Vec<String>,
    pub n_estimators: usize,
    pub n_features: usize,
    pub n_classes: usize,
}

/// Estimator `i` uses `bases[i % bases.len()]` on a bootstrap resample drawn
/// from the stream `derive_indexed(seed, i)`.
pub fn fit_bagging(bases: &[LearnerSpec], n_estimators: usize, train: &FeatureMatrix, seed: u64) -> Result<Model> {
    let n = train.n_samples();
    let resamples: Vec<Vec<usize>> =
        (0..n_estimators).map(|i| bootstrap_indices(n, seed::derive_indexed(seed, i as u64))).collect();
    fit_bagging_with_resamples(bases, &resamples, train, seed)
}

/// Bagging over explicit resamples (one estimator per resample).
pub fn fit_bagging_with_resamples(
    bases: &[LearnerSpec],
    resamples: &[Vec<usize>],
    train: &FeatureMatrix,
    seed: u64,
) -> Result<Model> {
    if bases.is_empty() || resamples.is_empty() {
        return Err(Error::Config("bagging needs at least one base learner and one estimator".into()));
    }
    let members = resamples
        .par_iter()
        .enumerate()
        .map(|(i, rows)| {
            let base = bases[i % bases.len()].with_seed(seed::derive_named(seed::derive_indexed(seed, i as u64), "learner"));
            base.fit(&train.select_rows(rows)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Model::Bagging(BaggingClassifier {
        base_kinds: (0..resamples.len()).map(|i| bases[i % bases.len()].kind().to_string()).collect(),
        n_estimators: resamples.len(),
        members,
        n_features: train.n_features(),
        n_classes: train.n_classes(),
    }))
}

impl Classifier for BaggingClassifier {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut acc = Array2::zeros((x.nrows(), self.n_classes));
        for m in &self.members {
            acc += &m.predict_proba(x)?;
        }
        acc /= self.members.len() as f64;
        Ok(acc)
    }
}
