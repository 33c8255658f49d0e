//! Acceptance run: one PASS/FAIL/SKIP line per criterion.
//!
//! Failing criteria are reported but do not fail the process unless
//! `IDSEMBLE_ACCEPTANCE_STRICT=1` is set.

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use common::*;
use idsemble::bench::*;
use idsemble::ensembles::*;
use idsemble::flowdata::{stratified_split, stratified_subsample, DatasetSchema, SynthSpec};
use idsemble::learners::*;
use idsemble::metrics::*;
use idsemble::{seed, Classifier, Model};
use ndarray::array;
use rand::Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn metric_oracle() -> Check {
    let mut rng = seed::rng(1);
    for case in 0..1000 {
        let c = rng.random_range(1..=8);
        let n = rng.random_range(1..300);
        let y_true: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        let y_pred: Vec<usize> = (0..n)
            .map(|i| if rng.random_bool(0.6) { y_true[i] } else { rng.random_range(0..c) })
            .collect();
        let cm = ok(confusion_matrix(&y_true, &y_pred, c))?;
        let r = ok(classification_report(&cm))?;
        let o = recount(&y_true, &y_pred, c);
        let direct = y_true.iter().zip(&y_pred).filter(|(a, b)| a == b).count() as f64 / n as f64;
        ensure(cm.trace() as f64 / cm.total() as f64 == direct, || format!("case {case}: trace/total"))?;
        ensure(r.accuracy == o.accuracy, || format!("case {case}: accuracy"))?;
        for k in 0..c {
            let m = &r.per_class[k];
            ensure(
                m.precision == o.precision[k] && m.recall == o.recall[k] && m.f1 == o.f1[k] && m.support == o.support[k],
                || format!("case {case}: class {k}"),
            )?;
        }
        ensure(
            r.weighted.precision == o.weighted_precision
                && r.weighted.recall == o.weighted_recall
                && r.weighted.f1 == o.weighted_f1,
            || format!("case {case}: weighted averages"),
        )?;
    }
    Ok("1000 fuzzed instances agree exactly".into())
}

fn knn_equivalence() -> Check {
    let mut rng = seed::rng(2);
    for case in 0..200u64 {
        let n = rng.random_range(2..=200);
        let d = rng.random_range(1..=8);
        let c = rng.random_range(2..=5);
        let k = rng.random_range(1..=n.min(15));
        // half the cases on small integer grids, where distance ties abound
        let (train, queries) = if case % 2 == 0 {
            (integer_grid(n, d, c, 4, case), integer_grid(20, d, c, 4, case + 10_000))
        } else {
            (blobs(n, d, c, 1.0, case), blobs(20, d, c, 1.0, case + 10_000))
        };
        let knn = ok(KnnClassifier::fit(&train, &KnnConfig { k }))?;
        let proba = ok(knn.predict_proba(queries.x()))?;
        let pred = ok(knn.predict(queries.x()))?;
        let scaled = ok(knn.scaler.transform(queries.x()))?;
        for (r, q) in scaled.outer_iter().enumerate() {
            let want = knn_oracle(knn.points.view(), train.y(), c, k, q);
            ensure(proba.row(r).to_vec() == want, || format!("case {case} row {r}: probabilities"))?;
            ensure(pred[r] == first_argmax(&want), || format!("case {case} row {r}: label"))?;
        }
    }
    Ok("200 fuzzed instances identical to exhaustive search".into())
}

fn gradient_checks() -> Check {
    let mut rng = seed::rng(3);
    let mut worst_lr = 0.0f64;
    let mut worst_mlp = 0.0f64;
    for case in 0..50u64 {
        let n = rng.random_range(5..30);
        let d = rng.random_range(1..6);
        let c = rng.random_range(2..5);
        let m = blobs(n, d, c, 1.0, case);
        let p: Vec<f64> = (0..logistic::logistic_param_count(d, c)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let l2 = rng.random_range(0.0..0.1);
        let (_, g) = logistic_loss_and_grad(m.x(), m.y(), c, &p, l2);
        let fd = central_differences(|q| logistic_loss_and_grad(m.x(), m.y(), c, q, l2).0, &p, 1e-5);
        worst_lr = worst_lr.max(relative_error(&g, &fd));

        let mut sizes = vec![d];
        for _ in 0..rng.random_range(1..3) {
            sizes.push(rng.random_range(2..8));
        }
        sizes.push(c);
        let p: Vec<f64> = (0..mlp_param_count(&sizes)).map(|_| rng.random_range(-0.8..0.8)).collect();
        let alpha = rng.random_range(0.0..0.1);
        let (_, g) = mlp_loss_and_grad(m.x(), m.y(), &sizes, &p, alpha);
        let fd = central_differences(|q| mlp_loss_and_grad(m.x(), m.y(), &sizes, q, alpha).0, &p, 1e-6);
        worst_mlp = worst_mlp.max(relative_error(&g, &fd));
    }
    let detail = format!("worst relative error LR {worst_lr:.2e}, MLP {worst_mlp:.2e}");
    ensure(worst_lr < 1e-4 && worst_mlp < 1e-4, || detail.clone())?;
    Ok(detail)
}

fn adaboost_recurrence() -> Check {
    let fixture = matrix(array![[1.0], [2.0], [3.0], [4.0]], vec![0, 0, 1, 0], 2);
    let (model, trace) = ok(AdaBoostClassifier::fit_traced(&fixture, 1, 1))?;
    ensure((trace.errors[0] - 0.25).abs() < 1e-12, || format!("epsilon {}", trace.errors[0]))?;
    ensure((model.alphas[0] - 3f64.ln()).abs() < 1e-12, || format!("alpha {}", model.alphas[0]))?;
    let after = trace.weights.last().unwrap();
    ensure((after[2] - 0.5).abs() < 1e-12, || format!("misclassified weight {}", after[2]))?;
    for i in [0, 1, 3] {
        ensure((after[i] - 1.0 / 6.0).abs() < 1e-12, || format!("weight {i} = {}", after[i]))?;
    }

    let mut checked = 0;
    for s in 0..30u64 {
        let m = blobs(60, 3, 2 + (s as usize % 3), 0.6, s);
        let Ok((_, trace)) = AdaBoostClassifier::fit_traced(&m, 50, 1) else { continue };
        for (round, w) in trace.weights.iter().enumerate() {
            ensure((w.iter().sum::<f64>() - 1.0).abs() < 1e-12, || format!("dataset {s} round {round}: sum"))?;
            ensure(w.iter().all(|v| *v > 0.0), || format!("dataset {s} round {round}: non-positive weight"))?;
        }
        checked += 1;
    }
    ensure(checked > 0, || "no fuzzed dataset trained".into())?;
    Ok(format!("fixture exact; weights a distribution on {checked} fuzzed datasets × ≤50 rounds"))
}

fn gradient_boosting() -> Check {
    for s in 0..20u64 {
        let c = 2 + s as usize % 3;
        let m = blobs(150, 4, c, 0.5, 100 + s);
        let gb = ok(GradientBoostClassifier::fit(&m, &BoostConfig { rounds: 100, ..BoostPreset::Gb.config() }))?;
        ensure(gb.train_loss.len() == 101, || format!("dataset {s}: {} loss entries", gb.train_loss.len()))?;
        for (r, w) in gb.train_loss.windows(2).enumerate() {
            ensure(w[1] <= w[0] + 1e-12, || format!("dataset {s} round {}: {} -> {}", r + 1, w[0], w[1]))?;
        }
        let zero = ok(GradientBoostClassifier::fit(&m, &BoostConfig { rounds: 0, ..BoostPreset::Gb.config() }))?;
        let p = ok(zero.predict_proba(m.x()))?;
        ensure(p.iter().all(|v| *v == 1.0 / c as f64), || format!("dataset {s}: zero-round output not uniform"))?;
    }
    Ok("loss nonincreasing on 20 datasets × 100 rounds; zero rounds uniform".into())
}

fn voting_algebra() -> Check {
    let mut rng = seed::rng(6);
    for case in 0..500u64 {
        let n_members = rng.random_range(2..6);
        let c = rng.random_range(2..5);
        let members: Vec<Model> = (0..n_members)
            .map(|j| LearnerSpec::Knn(KnnConfig { k: 1 }).fit(&integer_grid(12, 2, c, 3, case * 10 + j as u64)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let x = integer_grid(25, 2, c, 3, case + 77_777);
        let w: Vec<f64> = (0..n_members).map(|_| rng.random_range(0.01..5.0)).collect();
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let scaled: Vec<f64> = w.iter().map(|v| v * scale).collect();
        let a = ok(weighted_hard_vote(&members, &w, x.x()))?;
        let b = ok(weighted_hard_vote(&members, &scaled, x.x()))?;
        ensure(a == b, || format!("case {case}: scaling by {scale} changed labels"))?;
        let uniform = vec![scale; n_members];
        let u = ok(weighted_hard_vote(&members, &uniform, x.x()))?;
        let h = ok(hard_vote_majority(&members, x.x()))?;
        ensure(u == h, || format!("case {case}: uniform weights differ from majority"))?;
    }
    Ok("500 fuzzed cases scale-invariant; uniform weights equal majority".into())
}

fn fold_leakage() -> Result<usize, String> {
    let mut violations = 0;
    for s in 0..10u64 {
        let m = blobs(120, 3, 3, 1.0, 500 + s);
        let plans = vec![
            MemberPlan { learner: LearnerSpec::decision_tree(), pca_k: None },
            MemberPlan { learner: LearnerSpec::knn(), pca_k: Some(2) },
        ];
        let (_, log) = ok(out_of_fold_features(&plans, &m, 5, s))?;
        violations += log.violations();
        let stack = ok(StackingClassifier::fit(&plans, &LearnerSpec::decision_tree(), 5, &m, s))?;
        violations += stack.fold_log.violations();
    }
    Ok(violations)
}

fn mirror_run() -> Result<ReportBundle, String> {
    let mut cfg = mirror_config();
    cfg.subsample_fraction = None;
    ok(run_experiment(&cfg))
}

fn mirror_config() -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/roedunet_mirror.toml");
    ExperimentConfig::from_file(path).expect("mirror config parses")
}

fn by_name<'a>(b: &'a ReportBundle, prefix: &str) -> Result<&'a MethodResult, String> {
    b.methods.iter().find(|m| m.name.starts_with(prefix)).ok_or_else(|| format!("no method `{prefix}`"))
}

fn f1_of(m: &MethodResult) -> Result<f64, String> {
    m.report.as_ref().map(|r| r.weighted.f1).ok_or_else(|| format!("{} failed: {:?}", m.name, m.error))
}

fn seconds_of(m: &MethodResult) -> Result<f64, String> {
    m.runtime.as_ref().map(|r| r.total_seconds).ok_or_else(|| format!("{} has no runtime", m.name))
}

fn table_v_ordering(b: &ReportBundle) -> Check {
    let rf = f1_of(by_name(b, "Random Forest")?)?;
    let dt = f1_of(by_name(b, "Decision Tree")?)?;
    let lr = f1_of(by_name(b, "Logistic Regression")?)?;
    let mlp = f1_of(by_name(b, "Multi-Layer Perceptron")?)?;
    let detail = format!("F1 RF {rf:.4}, DT {dt:.4}, LR {lr:.4}, MLP {mlp:.4}");
    ensure(rf >= 0.99 && dt >= 0.99, || format!("{detail}: trees below 0.99"))?;
    ensure(rf.min(dt) - lr.max(mlp) >= 0.15, || format!("{detail}: margin under 0.15"))?;
    Ok(detail)
}

fn runtime_ordering(b: &ReportBundle) -> Check {
    let lr = seconds_of(by_name(b, "Logistic Regression")?)?;
    let dt = seconds_of(by_name(b, "Decision Tree")?)?;
    let rf = seconds_of(by_name(b, "Random Forest")?)?;
    let mlp = seconds_of(by_name(b, "Multi-Layer Perceptron")?)?;
    let blend = seconds_of(by_name(b, "Blending")?)?;
    let stack = seconds_of(by_name(b, "Stacking")?)?;
    let single = lr.max(dt).max(mlp);
    let detail = format!(
        "seconds LR {lr:.3}, DT {dt:.3}, RF {rf:.3}, MLP {mlp:.3}, blending {blend:.3}, stacking {stack:.3}"
    );
    let mut broken = Vec::new();
    if !(lr < dt) {
        broken.push("LR < DT");
    }
    if !(dt < rf) {
        broken.push("DT < RF");
    }
    if !(blend > single) {
        broken.push("blending > every base learner");
    }
    if !(stack > single) {
        broken.push("stacking > every base learner");
    }
    ensure(broken.is_empty(), || format!("{detail}; violated: {}", broken.join(", ")))?;
    Ok(detail)
}

fn cicids_smoke() -> Option<Check> {
    let schema_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas/cicids2017.toml");
    let schema = DatasetSchema::from_file(&schema_path).ok()?;
    if schema.files.is_empty() || !schema.files.iter().all(|f| f.exists()) {
        return None;
    }
    Some((|| {
        let (_, full, _) = ok(load_dataset(&DatasetConfig::Csv { schema: schema_path.clone(), files: Vec::new() }))?;
        let data = ok(stratified_subsample(&full, 0.02, 42))?;
        let (train, test) = ok(stratified_split(&data, 0.3, seed::derive_named(42, "split")))?;
        let cfg = mirror_config();
        let mut entries = Vec::new();
        let mut kinds = BTreeMap::new();
        for m in &cfg.methods {
            let spec = ok(m.spec())?.with_seed(seed::derive_named(42, &m.name));
            let start = Instant::now();
            let model = ok(match &spec {
                MethodSpec::Learner(l) => l.fit(&train),
                MethodSpec::Ensemble(e) => e.fit(&train),
            })?;
            let pred = ok(model.predict(test.x()))?;
            let seconds = start.elapsed().as_secs_f64();
            let report = ok(evaluate(test.y(), &pred, test.class_names()))?;
            kinds.insert(m.name.clone(), matches!(spec, MethodSpec::Ensemble(_)));
            entries.push((m.name.clone(), report, RuntimeRecord::new(m.name.clone(), seconds, 0.0)));
        }
        let ranking = ok(rank_models(&entries))?;
        let rf = ranking.iter().find(|r| r.name.starts_with("Random Forest")).map_or(0.0, |r| r.f1);
        let top5: Vec<&RankingRow> = ranking.iter().take(5).collect();
        let ensembles_in_top5 = top5.iter().filter(|r| kinds[&r.name] && !r.name.starts_with("Random Forest")).count();
        let names: Vec<&str> = top5.iter().map(|r| r.name.as_str()).collect();
        let detail = format!("RF F1 {rf:.4}; top-5 {names:?}");
        ensure(rf >= 0.99, || format!("{detail}: RF below 0.99"))?;
        ensure(names.iter().any(|n| n.starts_with("Random Forest")), || format!("{detail}: RF not in top 5"))?;
        ensure(ensembles_in_top5 >= 3, || format!("{detail}: {ensembles_in_top5} other ensembles"))?;
        Ok(detail)
    })())
}

fn metrics_json_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir.join("methods")).expect("methods directory") {
        let path = entry.expect("dir entry").path();
        let bytes = std::fs::read(path.join("metrics.json")).unwrap_or_default();
        out.insert(path.file_name().unwrap().to_string_lossy().into_owned(), bytes);
    }
    out
}

fn determinism(leaks: &mut usize) -> Check {
    let tmp = ok(tempfile::tempdir())?;
    let mut cfg = mirror_config();
    cfg.dataset = DatasetConfig::Synthetic(SynthSpec::roedunet_mirror(10_000, 7));
    let mut reference = None;
    for threads in [1usize, 8] {
        for run in 0..2 {
            cfg.threads = Some(threads);
            let out = tmp.path().join(format!("t{threads}-r{run}"));
            let (bundle, _) = ok(run_and_emit(&cfg, Some(&out)))?;
            *leaks += bundle.leakage_violations;
            let files = metrics_json_files(&out);
            ensure(files.len() == 14, || format!("{} metric files", files.len()))?;
            match &reference {
                None => reference = Some(files),
                Some(r) => ensure(*r == files, || format!("threads {threads} run {run}: metrics JSON differs"))?,
            }
        }
    }
    Ok("14 metrics.json files byte-identical over 2 runs × threads {1, 8}".into())
}

fn main() {
    let started = Instant::now();
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut record = |id: usize, title: &'static str, f: &mut dyn FnMut() -> Option<Check>| {
        let t = Instant::now();
        let outcome = match f() {
            None => Outcome::Skip("data not present".into()),
            Some(Ok(d)) => Outcome::Pass(d),
            Some(Err(d)) => Outcome::Fail(d),
        };
        let secs = t.elapsed().as_secs_f64();
        results.push((id, title, outcome, secs));
    };

    record(1, "metric oracle", &mut || Some(metric_oracle()));
    record(2, "KNN brute-force equivalence", &mut || Some(knn_equivalence()));
    record(3, "gradient checks", &mut || Some(gradient_checks()));
    record(4, "AdaBoost recurrence", &mut || Some(adaboost_recurrence()));
    record(5, "gradient boosting loss", &mut || Some(gradient_boosting()));
    record(6, "voting algebra", &mut || Some(voting_algebra()));

    let mut bench_leaks = 0usize;
    let t = Instant::now();
    let mirror = mirror_run();
    let mirror_secs = t.elapsed().as_secs_f64();
    if let Ok(b) = &mirror {
        bench_leaks += b.leakage_violations;
    }
    record(8, "mirror F1 ordering", &mut || Some(mirror.as_ref().map_err(Clone::clone).and_then(table_v_ordering)));
    record(9, "runtime ordering", &mut || Some(mirror.as_ref().map_err(Clone::clone).and_then(runtime_ordering)));
    record(10, "CICIDS-2017 smoke", &mut cicids_smoke);
    record(11, "determinism", &mut || Some(determinism(&mut bench_leaks)));
    record(7, "leakage guards", &mut || {
        Some(fold_leakage().and_then(|folds| {
            let detail = format!("{folds} fold violations, {bench_leaks} bench violations");
            ensure(folds == 0 && bench_leaks == 0 && mirror.is_ok(), || detail.clone())?;
            Ok(detail)
        }))
    });

    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (id, title, outcome, secs) in &results {
        let secs = if matches!(id, 8 | 9) { *secs + mirror_secs } else { *secs };
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("criterion {id:>2} {tag} {title} ({secs:.1}s): {detail}");
    }
    println!("{} of {} criteria failed; total {:.1}s", failed, results.len(), started.elapsed().as_secs_f64());
    if failed > 0 && std::env::var("IDSEMBLE_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
