//! Voting, bagging, forests, boosting, stacking and blending.

pub mod adaboost;
pub mod bagging;
pub mod blending;
pub mod forest;
pub mod gboost;
pub mod stacking;
pub mod voting;

use serde::{Deserialize, Serialize};

pub use adaboost::{AdaBoostClassifier, AdaBoostTrace};
pub use bagging::{fit_bagging, fit_bagging_with_resamples, BaggingClassifier};
pub use blending::{blending_split, holdout_features, BlendingClassifier};
pub use forest::{bootstrap_indices, fit_random_forest, ForestConfig, RandomForest};
pub use gboost::{BoostConfig, BoostPreset, GradientBoostClassifier};
pub use stacking::{meta_features, out_of_fold_features, FoldLog, FoldRecord, MemberPlan, PcaPipeline, StackingClassifier};
pub use voting::{
    average_probabilities, hard_vote_majority, majority_vote_labels, soft_vote_average, vote_shares,
    weighted_hard_vote, weighted_vote_labels, VoteRule, VotingClassifier,
};

use crate::flowdata::FeatureMatrix;
use crate::learners::{LearnerSpec, TreeConfig};
use crate::{seed, Error, Model, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Average,
    MaxVote,
    WeightedVote,
    Bagging,
    RandomForest,
    Adaboost,
    GradientBoost,
    Stacking,
    Blending,
}

pub const DEFAULT_HOLDOUT_FRACTION: f64 = 0.25;
pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_PCA_K: usize = 10;
pub const DEFAULT_BAGGING_ESTIMATORS: usize = 4;
pub const DEFAULT_ADABOOST_ROUNDS: usize = 50;

/// Declarative ensemble description. Unset fields take per-kind defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    #[serde(default)]
    pub members: Vec<LearnerSpec>,
    pub weights: Option<Vec<f64>>,
    pub meta: Option<LearnerSpec>,
    pub holdout_fraction: Option<f64>,
    pub n_estimators: Option<usize>,
    /// Stacking PCA width; `min(d, 10)` when unset.
    pub pca_k: Option<usize>,
    /// Per-member PCA switch; stacking defaults to all on, blending to all off.
    pub pca_members: Option<Vec<bool>>,
    pub folds: Option<usize>,
    pub preset: Option<BoostPreset>,
    pub learning_rate: Option<f64>,
    pub max_depth: Option<usize>,
    pub l2_leaf: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    42
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind) -> Self {
        EnsembleSpec {
            kind,
            members: Vec::new(),
            weights: None,
            meta: None,
            holdout_fraction: None,
            n_estimators: None,
            pca_k: None,
            pca_members: None,
            folds: None,
            preset: None,
            learning_rate: None,
            max_depth: None,
            l2_leaf: None,
            seed: default_seed(),
        }
    }

    pub fn with_members(mut self, members: Vec<LearnerSpec>) -> Self {
        self.members = members;
        self
    }

    /// Members after applying the per-kind defaults.
    pub fn resolved_members(&self) -> Vec<LearnerSpec> {
        if !self.members.is_empty() {
            return self.members.clone();
        }
        use LearnerSpec as L;
        match self.kind {
            EnsembleKind::Average | EnsembleKind::MaxVote | EnsembleKind::WeightedVote => {
                vec![L::decision_tree(), L::knn(), L::random_forest()]
            }
            EnsembleKind::Bagging => vec![L::random_forest()],
            EnsembleKind::Stacking | EnsembleKind::Blending => {
                vec![L::random_forest(), L::mlp(), L::logistic_regression(), L::decision_tree()]
            }
            _ => Vec::new(),
        }
    }

    /// Weights after defaults: 0.4 / 0.3 / 0.3 for the default DT, KNN, RF trio.
    pub fn resolved_weights(&self) -> Option<Vec<f64>> {
        match (&self.weights, self.kind) {
            (Some(w), _) => Some(w.clone()),
            (None, EnsembleKind::WeightedVote) if self.members.is_empty() => Some(vec![0.4, 0.3, 0.3]),
            _ => None,
        }
    }

    pub fn boost_config(&self) -> BoostConfig {
        let mut c = self.preset.unwrap_or_default().config();
        if let Some(v) = self.n_estimators {
            c.rounds = v;
        }
        if let Some(v) = self.learning_rate {
            c.learning_rate = v;
        }
        if let Some(v) = self.max_depth {
            c.max_depth = v;
        }
        if let Some(v) = self.l2_leaf {
            c.l2_leaf = v;
        }
        c
    }

    pub fn forest_config(&self) -> ForestConfig {
        let d = ForestConfig::default();
        ForestConfig {
            n_estimators: self.n_estimators.unwrap_or(d.n_estimators),
            max_depth: self.max_depth.or(d.max_depth),
            seed: self.seed,
            ..d
        }
    }

    fn plans(&self, n_features: usize) -> Vec<MemberPlan> {
        let members = self.resolved_members();
        let default_on = self.kind == EnsembleKind::Stacking;
        let k = self.pca_k.unwrap_or(DEFAULT_PCA_K.min(n_features));
        members
            .into_iter()
            .enumerate()
            .map(|(i, learner)| {
                let on = self.pca_members.as_ref().map_or(default_on, |f| f[i]);
                MemberPlan { learner, pca_k: on.then_some(k) }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind;
        let members = self.resolved_members();
        let is_vote = matches!(kind, EnsembleKind::Average | EnsembleKind::MaxVote | EnsembleKind::WeightedVote);
        if is_vote && members.len() < 2 {
            return Err(Error::Config("voting ensembles need at least 2 members".into()));
        }
        if kind == EnsembleKind::Stacking && members.len() < 2 {
            return Err(Error::Config("stacking needs at least 2 members".into()));
        }
        if kind == EnsembleKind::Blending && members.is_empty() {
            return Err(Error::Config("blending needs at least 1 member".into()));
        }
        match (kind, self.resolved_weights()) {
            (EnsembleKind::WeightedVote, None) => {
                return Err(Error::Config("weighted_vote needs weights for custom members".into()))
            }
            (EnsembleKind::WeightedVote, Some(w)) => {
                if w.len() != members.len() {
                    return Err(Error::Config(format!("{} weights for {} members", w.len(), members.len())));
                }
                if w.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return Err(Error::Config("weights must be positive".into()));
                }
            }
            (_, Some(_)) => return Err(Error::Config("weights are only valid for weighted_vote".into())),
            _ => {}
        }
        match (kind, self.holdout_fraction) {
            (EnsembleKind::Blending, Some(f)) if !(f > 0.0 && f < 1.0) => {
                return Err(Error::Config(format!("holdout_fraction {f} outside (0, 1)")))
            }
            (EnsembleKind::Blending, _) => {}
            (_, Some(_)) => return Err(Error::Config("holdout_fraction is only valid for blending".into())),
            _ => {}
        }
        if self.n_estimators == Some(0) && kind != EnsembleKind::GradientBoost {
            return Err(Error::Config("n_estimators must be at least 1".into()));
        }
        if let Some(flags) = &self.pca_members {
            if flags.len() != members.len() {
                return Err(Error::Config("pca_members length differs from members".into()));
            }
        }
        if self.pca_k == Some(0) {
            return Err(Error::Config("pca_k must be at least 1".into()));
        }
        if self.folds.is_some_and(|k| k < 2) {
            return Err(Error::Config("folds must be at least 2".into()));
        }
        if self.learning_rate.is_some_and(|v| !(v > 0.0)) || self.l2_leaf.is_some_and(|v| !(v >= 0.0)) {
            return Err(Error::Config("learning_rate must be > 0 and l2_leaf >= 0".into()));
        }
        Ok(())
    }

    pub fn fit(&self, train: &FeatureMatrix) -> Result<Model> {
        self.validate()?;
        let members = self.resolved_members();
        let meta = self.meta.clone().unwrap_or(LearnerSpec::DecisionTree(TreeConfig::default()));
        let fit_members = || -> Result<Vec<Model>> {
            use rayon::prelude::*;
            members
                .par_iter()
                .enumerate()
                .map(|(i, m)| m.with_seed(seed::derive_indexed(self.seed, i as u64)).fit(train))
                .collect()
        };
        match self.kind {
            EnsembleKind::Average => Ok(Model::Voting(VotingClassifier::new(fit_members()?, VoteRule::Average)?)),
            EnsembleKind::MaxVote => Ok(Model::Voting(VotingClassifier::new(fit_members()?, VoteRule::Majority)?)),
            EnsembleKind::WeightedVote => {
                let w = self.resolved_weights().expect("validated");
                Ok(Model::Voting(VotingClassifier::new(fit_members()?, VoteRule::Weighted(w))?))
            }
            EnsembleKind::Bagging => fit_bagging(
                &members,
                self.n_estimators.unwrap_or(DEFAULT_BAGGING_ESTIMATORS),
                train,
                self.seed,
            ),
            EnsembleKind::RandomForest => fit_random_forest(train, &self.forest_config()),
            EnsembleKind::Adaboost => Ok(Model::AdaBoost(AdaBoostClassifier::fit(
                train,
                self.n_estimators.unwrap_or(DEFAULT_ADABOOST_ROUNDS),
                self.max_depth.unwrap_or(1),
            )?)),
            EnsembleKind::GradientBoost => {
                Ok(Model::GradientBoost(GradientBoostClassifier::fit(train, &self.boost_config())?))
            }
            EnsembleKind::Stacking => Ok(Model::Stacking(StackingClassifier::fit(
                &self.plans(train.n_features()),
                &meta,
                self.folds.unwrap_or(DEFAULT_FOLDS),
                train,
                self.seed,
            )?)),
            EnsembleKind::Blending => Ok(Model::Blending(BlendingClassifier::fit(
                &self.plans(train.n_features()),
                &meta,
                self.holdout_fraction.unwrap_or(DEFAULT_HOLDOUT_FRACTION),
                train,
                self.seed,
            )?)),
        }
    }

    /// Copy with the master seed replaced.
    pub fn with_seed(&self, seed: u64) -> Self {
        EnsembleSpec { seed, ..self.clone() }
    }
}
