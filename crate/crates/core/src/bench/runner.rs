use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::config::{DatasetConfig, ExperimentConfig, MethodSpec};
use crate::flowdata::{
    load_tables, preprocess, stratified_split_indices, stratified_subsample, DatasetSchema, FeatureMatrix,
    PreprocessReport,
};
use crate::metrics::{evaluate, rank_models, time_phase, MetricReport, RankingRow, RuntimeRecord};
use crate::{seed, Classifier, Error, Model, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub n_samples: usize,
    pub n_features: usize,
    pub class_names: Vec<String>,
    pub train_rows: usize,
    pub test_rows: usize,
    pub preprocess: Option<PreprocessReport>,
}

/// Outcome of one configured method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub name: String,
    pub kind: String,
    /// `derive_named(master_seed, name)`.
    pub seed: u64,
    pub heavy: bool,
    pub train_rows: usize,
    pub report: Option<MetricReport>,
    pub runtime: Option<RuntimeRecord>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
    pub threads: usize,
    pub dataset: DatasetSummary,
    pub methods: Vec<MethodResult>,
    pub ranking: Vec<RankingRow>,
    /// False when methods ran concurrently.
    pub runtime_table: bool,
    /// Fits that saw a test row, plus stacking fold leaks. Always 0.
    pub leakage_violations: usize,
}

/// Loads and preprocesses (or generates) the configured dataset.
pub fn load_dataset(cfg: &DatasetConfig) -> Result<(String, FeatureMatrix, Option<PreprocessReport>)> {
    match cfg {
        DatasetConfig::Synthetic(spec) => Ok(("synthetic".into(), spec.generate()?, None)),
        DatasetConfig::Csv { schema, files } => {
            let schema = DatasetSchema::from_file(schema)?;
            let files = if files.is_empty() { schema.files.clone() } else { files.clone() };
            if files.is_empty() {
                return Err(Error::Config(format!("dataset `{}` lists no files", schema.name)));
            }
            let raw = load_tables(&files, &schema)?;
            let (m, report) = preprocess(&raw, &schema)?;
            Ok((schema.name.clone(), m, Some(report)))
        }
    }
}

struct Prepared<'a> {
    train: &'a FeatureMatrix,
    test: &'a FeatureMatrix,
    test_ids: &'a HashSet<usize>,
}

fn leaked_rows(m: &FeatureMatrix, test_ids: &HashSet<usize>) -> usize {
    m.row_ids().iter().filter(|id| test_ids.contains(id)).count()
}

fn run_method(
    cfg: &ExperimentConfig,
    name: &str,
    heavy: bool,
    spec: &MethodSpec,
    data: &Prepared<'_>,
) -> (MethodResult, usize) {
    let method_seed = seed::derive_named(cfg.seed, name);
    let spec = spec.with_seed(method_seed);
    let mut result = MethodResult {
        name: name.to_string(),
        kind: spec.kind(),
        seed: method_seed,
        heavy,
        train_rows: 0,
        report: None,
        runtime: None,
        error: None,
    };
    let mut leaks = 0;
    let outcome = (|| -> Result<(MetricReport, RuntimeRecord)> {
        let subsampled;
        let train = match (heavy, cfg.subsample_fraction) {
            (true, Some(f)) if f < 1.0 => {
                subsampled = stratified_subsample(data.train, f, seed::derive_named(method_seed, "subsample"))?;
                &subsampled
            }
            _ => data.train,
        };
        result.train_rows = train.n_samples();
        leaks += leaked_rows(train, data.test_ids);
        debug_assert_eq!(leaks, 0, "method `{name}` would train on test rows");
        if leaks > 0 {
            return Err(Error::Precondition(format!("method `{name}` would train on {leaks} test rows")));
        }
        let (model, fit_s) = time_phase("fit", || match &spec {
            MethodSpec::Learner(l) => l.fit(train),
            MethodSpec::Ensemble(e) => e.fit(train),
        })?;
        if let Model::Stacking(s) = &model {
            leaks += s.fold_log.violations();
        }
        let (pred, predict_s) = time_phase("predict", || model.predict(data.test.x()))?;
        let report = evaluate(data.test.y(), &pred, data.test.class_names())?;
        Ok((report, RuntimeRecord::new(name, fit_s, predict_s)))
    })();
    match outcome {
        Ok((report, runtime)) => {
            result.report = Some(report);
            result.runtime = Some(runtime);
        }
        Err(e) => result.error = Some(error_chain(&e)),
    }
    (result, leaks)
}

fn error_chain(e: &Error) -> String {
    let mut s = e.to_string();
    let mut src = std::error::Error::source(e);
    while let Some(inner) = src {
        s.push_str(": ");
        s.push_str(&inner.to_string());
        src = inner.source();
    }
    s
}

/// Runs every configured method and assembles the report bundle. Nothing is
/// written; see [`super::emit_reports`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ReportBundle> {
    cfg.validate()?;
    let specs: Vec<MethodSpec> = cfg.methods.iter().map(|m| m.spec()).collect::<Result<_>>()?;
    let threads = cfg.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_in_pool(cfg, &specs, threads))
}

fn run_in_pool(cfg: &ExperimentConfig, specs: &[MethodSpec], threads: usize) -> Result<ReportBundle> {
    let (name, data, pre_report) = load_dataset(&cfg.dataset)?;
    let split = stratified_split_indices(
        data.y(),
        data.class_names(),
        cfg.split.test_fraction,
        seed::derive_named(cfg.seed, "split"),
    )?;
    let train = data.select_rows(&split.train)?;
    let test = data.select_rows(&split.test)?;
    let test_ids: HashSet<usize> = test.row_ids().iter().copied().collect();
    let prepared = Prepared { train: &train, test: &test, test_ids: &test_ids };

    let outcomes: Vec<(MethodResult, usize)> = if cfg.parallel_methods {
        use rayon::prelude::*;
        cfg.methods
            .par_iter()
            .zip(specs)
            .map(|(m, s)| run_method(cfg, &m.name, m.heavy, s, &prepared))
            .collect()
    } else {
        cfg.methods.iter().zip(specs).map(|(m, s)| run_method(cfg, &m.name, m.heavy, s, &prepared)).collect()
    };
    let leakage_violations = outcomes.iter().map(|o| o.1).sum();
    let methods: Vec<MethodResult> = outcomes.into_iter().map(|o| o.0).collect();

    let ranked: Vec<(String, MetricReport, RuntimeRecord)> = methods
        .iter()
        .filter_map(|m| Some((m.name.clone(), m.report.clone()?, m.runtime.clone()?)))
        .collect();
    let ranking = if ranked.is_empty() { Vec::new() } else { rank_models(&ranked)? };

    Ok(ReportBundle {
        experiment: cfg.name.clone(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        threads,
        dataset: DatasetSummary {
            name,
            n_samples: data.n_samples(),
            n_features: data.n_features(),
            class_names: data.class_names().to_vec(),
            train_rows: train.n_samples(),
            test_rows: test.n_samples(),
            preprocess: pre_report,
        },
        methods,
        ranking,
        runtime_table: !cfg.parallel_methods,
        leakage_violations,
    })
}
