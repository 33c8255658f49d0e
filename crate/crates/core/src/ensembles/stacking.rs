//! Stacking with an out-of-fold protocol and optional PCA pipelines.

use ndarray::{s, Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::flowdata::{stratified_kfold, FeatureMatrix};
use crate::learners::LearnerSpec;
use crate::numcore::{pca_fit, PcaModel};
use crate::{seed, Classifier, Error, Model, Result};

/// PCA projection followed by a classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaPipeline {
    pub pca: PcaModel,
    pub model: Box<Model>,
}

impl Classifier for PcaPipeline {
    fn n_classes(&self) -> usize {
        self.model.n_classes()
    }

    fn n_features(&self) -> usize {
        self.pca.n_features()
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.model.predict_proba(self.pca.transform(x)?.view())
    }
}

/// One ensemble member: a learner, optionally behind a PCA projection.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberPlan {
    pub learner: LearnerSpec,
    /// Requested component count; clamped to `min(n - 1, d)` at fit time.
    pub pca_k: Option<usize>,
}

impl MemberPlan {
    pub fn fit(&self, train: &FeatureMatrix) -> Result<Model> {
        let Some(k) = self.pca_k else {
            return self.learner.fit(train);
        };
        let n = train.n_samples();
        if n < 2 {
            return Err(Error::Precondition("pca member needs at least 2 rows".into()));
        }
        let k = k.min(n - 1).min(train.n_features()).max(1);
        let pca = pca_fit(train.x(), k)?;
        let projected = pca.transform(train.x())?;
        let names = (0..k).map(|j| format!("pc{j}")).collect();
        let model = self.learner.fit(&train.with_features(projected, names)?)?;
        Ok(Model::Pipeline(PcaPipeline { pca, model: Box::new(model) }))
    }
}

/// Training rows seen and scored by one member in one fold.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub member: usize,
    pub fold: usize,
    pub fit_row_ids: Vec<usize>,
    pub scored_row_ids: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FoldLog {
    pub records: Vec<FoldRecord>,
}

impl FoldLog {
    /// Number of (record, row) pairs where a member scored a row it was fit on.
    pub fn violations(&self) -> usize {
        self.records
            .iter()
            .map(|r| {
                let fit: std::collections::HashSet<_> = r.fit_row_ids.iter().collect();
                r.scored_row_ids.iter().filter(|id| fit.contains(id)).count()
            })
            .sum()
    }

    pub fn check(&self) -> Result<()> {
        match self.violations() {
            0 => Ok(()),
            v => Err(Error::Precondition(format!("stacking leakage: {v} rows scored by a member fit on them"))),
        }
    }
}

/// Concatenated member probabilities, `n × (members · C)`.
pub fn meta_features(members: &[Model], x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let c = members[0].n_classes();
    let mut out = Array2::zeros((x.nrows(), members.len() * c));
    for (m, model) in members.iter().enumerate() {
        out.slice_mut(s![.., m * c..(m + 1) * c]).assign(&model.predict_proba(x)?);
    }
    Ok(out)
}

pub(crate) fn meta_feature_names(n_members: usize, class_names: &[String]) -> Vec<String> {
    (0..n_members).flat_map(|m| class_names.iter().map(move |c| format!("m{m}:{c}"))).collect()
}

pub(crate) fn seeded_plans(plans: &[MemberPlan], seed: u64) -> Vec<MemberPlan> {
    plans
        .iter()
        .enumerate()
        .map(|(m, p)| MemberPlan { learner: p.learner.with_seed(seed::derive_indexed(seed, m as u64)), pca_k: p.pca_k })
        .collect()
}

/// Out-of-fold member probabilities: every row is scored by copies of the
/// members fit on the other `k - 1` folds.
pub fn out_of_fold_features(
    plans: &[MemberPlan],
    train: &FeatureMatrix,
    k: usize,
    seed: u64,
) -> Result<(Array2<f64>, FoldLog)> {
    let c = train.n_classes();
    let fold_of = stratified_kfold(train.y(), c, k, seed::derive_named(seed, "folds"))?;
    let mut fold_rows = vec![Vec::new(); k];
    for (i, &f) in fold_of.iter().enumerate() {
        fold_rows[f].push(i);
    }
    if let Some(small) = fold_rows.iter().map(Vec::len).min().filter(|&s| s < c) {
        return Err(Error::Config(format!("stacking fold of {small} rows is smaller than the {c} classes")));
    }
    let plans = seeded_plans(plans, seed);
    let tasks: Vec<(usize, usize)> = (0..plans.len()).flat_map(|m| (0..k).map(move |f| (m, f))).collect();
    let results = tasks
        .par_iter()
        .map(|&(m, f)| {
            let fit_rows: Vec<usize> = (0..fold_of.len()).filter(|&i| fold_of[i] != f).collect();
            let fit = train.select_rows(&fit_rows)?;
            let scored = train.select_rows(&fold_rows[f])?;
            let model = plans[m].fit(&fit)?;
            let proba = model.predict_proba(scored.x())?;
            let record = FoldRecord {
                member: m,
                fold: f,
                fit_row_ids: fit.row_ids().to_vec(),
                scored_row_ids: scored.row_ids().to_vec(),
            };
            Ok((proba, record))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut features = Array2::zeros((train.n_samples(), plans.len() * c));
    let mut log = FoldLog::default();
    for ((m, f), (proba, record)) in tasks.into_iter().zip(results) {
        for (j, &row) in fold_rows[f].iter().enumerate() {
            features.slice_mut(s![row, m * c..(m + 1) * c]).assign(&proba.row(j));
        }
        log.records.push(record);
    }
    Ok((features, log))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackingClassifier {
    /// Members refit on the whole training set.
    pub members: Vec<Model>,
    pub meta: Box<Model>,
    pub folds: usize,
    pub n_features: usize,
    pub n_classes: usize,
    #[serde(skip)]
    pub fold_log: FoldLog,
}

impl StackingClassifier {
    pub fn fit(plans: &[MemberPlan], meta: &LearnerSpec, folds: usize, train: &FeatureMatrix, seed: u64) -> Result<Self> {
        if plans.len() < 2 {
            return Err(Error::Ensemble("stacking needs at least 2 members".into()));
        }
        if train.n_classes() < 2 {
            return Err(Error::Precondition("stacking needs at least 2 classes".into()));
        }
        let (oof, fold_log) = out_of_fold_features(plans, train, folds, seed)?;
        fold_log.check()?;
        let meta_train = train.with_features(oof, meta_feature_names(plans.len(), train.class_names()))?;
        let meta = meta.with_seed(seed::derive_named(seed, "meta")).fit(&meta_train)?;
        let members = seeded_plans(plans, seed).par_iter().map(|p| p.fit(train)).collect::<Result<Vec<_>>>()?;
        Ok(StackingClassifier {
            members,
            meta: Box::new(meta),
            folds,
            n_features: train.n_features(),
            n_classes: train.n_classes(),
            fold_log,
        })
    }
}

impl Classifier for StackingClassifier {
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
