use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stacking::{meta_feature_names, meta_features, seeded_plans, MemberPlan};
use crate::flowdata::{stratified_split_indices, FeatureMatrix};
use crate::learners::LearnerSpec;
use crate::{seed, Classifier, Error, Model, Result};

/// Members fit on one part of the training set; the meta learner is fit on
/// their probabilities over the held-out rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlendingClassifier {
    pub members: Vec<Model>,
    pub meta: Box<Model>,
    pub holdout_rows: usize,
    pub n_features: usize,
    pub n_classes: usize,
}

/// Stratified fit/holdout partition used by blending.
pub fn blending_split(train: &FeatureMatrix, holdout_fraction: f64, seed: u64) -> Result<(FeatureMatrix, FeatureMatrix)> {
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(Error::Config(format!("holdout_fraction {holdout_fraction} outside (0, 1)")));
    }
    let idx = stratified_split_indices(train.y(), train.class_names(), holdout_fraction, seed::derive_named(seed, "holdout"))?;
    let holdout = train.select_rows(&idx.test)?;
    let counts = holdout.class_counts();
    if let Some(c) = (0..train.n_classes()).find(|&c| counts[c] == 0) {
        return Err(Error::Split(format!("class `{}` is missing from the blending holdout", train.class_names()[c])));
    }
    Ok((train.select_rows(&idx.train)?, holdout))
}

/// Member probabilities on the holdout plus the fitted members.
pub fn holdout_features(
    plans: &[MemberPlan],
    fit: &FeatureMatrix,
    holdout: &FeatureMatrix,
    seed: u64,
) -> Result<(Array2<f64>, Vec<Model>)> {
    let members = seeded_plans(plans, seed).par_iter().map(|p| p.fit(fit)).collect::<Result<Vec<_>>>()?;
    Ok((meta_features(&members, holdout.x())?, members))
}

impl BlendingClassifier {
    pub fn fit(
        plans: &[MemberPlan],
        meta: &LearnerSpec,
        holdout_fraction: f64,
        train: &FeatureMatrix,
        seed: u64,
    ) -> Result<Self> {
        if plans.is_empty() {
            return Err(Error::Ensemble("blending needs at least one member".into()));
        }
        let (fit, holdout) = blending_split(train, holdout_fraction, seed)?;
        let (features, members) = holdout_features(plans, &fit, &holdout, seed)?;
        let meta_train = holdout.with_features(features, meta_feature_names(plans.len(), train.class_names()))?;
        let meta = meta.with_seed(seed::derive_named(seed, "meta")).fit(&meta_train)?;
        Ok(BlendingClassifier {
            members,
            meta: Box::new(meta),
            holdout_rows: holdout.n_samples(),
            n_features: train.n_features(),
            n_classes: train.n_classes(),
        })
    }
}

impl Classifier for BlendingClassifier {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.meta.predict_proba(meta_features(&self.members, x)?.view())
    }
}
