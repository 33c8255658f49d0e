mod common;

use common::*;
use idsemble::metrics::*;
use idsemble::Error;
use proptest::prelude::*;

fn report(y_true: &[usize], y_pred: &[usize], c: usize) -> MetricReport {
    classification_report(&confusion_matrix(y_true, y_pred, c).unwrap()).unwrap()
}

fn labelled(c: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    proptest::collection::vec((0..c, 0..c), 1..200).prop_map(|pairs| pairs.into_iter().unzip())
}

#[test]
fn two_by_two_example() {
    let r = report(&[0, 0, 1, 1], &[0, 1, 1, 1], 2);
    assert_eq!(r.confusion.counts, vec![vec![1, 1], vec![0, 2]]);
    assert_eq!(r.accuracy, 0.75);
    assert_eq!((r.per_class[0].precision, r.per_class[0].recall), (1.0, 0.5));
    assert_eq!(r.per_class[1].recall, 1.0);
    assert!((r.per_class[1].precision - 2.0 / 3.0).abs() < 1e-15);
    // (2·2/3 + 2·0.8) / 4
    assert!((r.weighted.f1 - (4.0 / 3.0 + 1.6) / 4.0).abs() < 1e-15);
}

#[test]
fn never_predicted_class_scores_zero() {
    let r = report(&[0, 1, 2, 2], &[0, 1, 1, 1], 3);
    assert_eq!(r.per_class[2].precision, 0.0);
    assert_eq!(r.per_class[2].recall, 0.0);
    assert_eq!(r.per_class[2].f1, 0.0);
    assert!(r.zero_division >= 2);
}

#[test]
fn bad_inputs() {
    assert!(matches!(confusion_matrix(&[0, 1], &[0], 2), Err(Error::Dimension(_))));
    assert!(matches!(confusion_matrix(&[0, 3], &[0, 0], 3), Err(Error::LabelRange { value: 3, classes: 3 })));
    let empty = confusion_matrix(&[], &[], 2).unwrap();
    assert!(matches!(classification_report(&empty), Err(Error::Precondition(_))));
    assert!(matches!(empty.with_class_names(&names("x", 3)), Err(Error::Dimension(_))));
}

#[test]
fn evaluate_carries_class_names() {
    let class_names = vec!["Normal".to_string(), "DoS".to_string()];
    let r = evaluate(&[0, 1, 1], &[0, 1, 0], &class_names).unwrap();
    assert_eq!(r.per_class[1].name, "DoS");
    assert_eq!(r.confusion.to_csv().unwrap(), "true\\predicted,Normal,DoS\nNormal,1,0\nDoS,1,1\n");
}

fn entry(name: &str, truth: &[usize], pred: &[usize], seconds: f64) -> (String, MetricReport, RuntimeRecord) {
    (name.to_string(), report(truth, pred, 2), RuntimeRecord::new(name, seconds, 0.0))
}

#[test]
fn ranking_orders_by_f1_then_tie_breakers() {
    let truth = [0, 0, 1, 1];
    let rows = rank_models(&[
        entry("worse", &truth, &[0, 1, 0, 1], 0.1),
        entry("slow", &truth, &[0, 0, 1, 1], 5.0),
        entry("fast", &truth, &[0, 0, 1, 1], 1.0),
        entry("b-tie", &truth, &[0, 0, 1, 0], 1.0),
        entry("a-tie", &truth, &[0, 0, 1, 0], 1.0),
    ])
    .unwrap();
    let order: Vec<&str> = rows.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(order, ["fast", "slow", "a-tie", "b-tie", "worse"]);
    assert_eq!(rows.iter().map(|r| r.rank).collect::<Vec<_>>(), [1, 2, 3, 4, 5]);
    assert!(matches!(rank_models(&[]), Err(Error::Precondition(_))));
}

#[test]
fn ranking_renderings() {
    let truth = [0, 1];
    let rows = rank_models(&[entry("DT", &truth, &[0, 1], 0.25)]).unwrap();
    assert_eq!(
        ranking_csv(&rows, true).unwrap(),
        "rank,model,accuracy,precision,recall,f1,seconds\n1,DT,1.000000,1.000000,1.000000,1.000000,0.250000\n"
    );
    let text = render_ranking_text(&rows);
    let header: Vec<&str> = text.lines().next().unwrap().split('|').map(str::trim).collect();
    assert_eq!(header, ["Models", "ACC", "PRE", "REC", "F1"]);
    assert!(text.lines().nth(2).unwrap().contains("1.0000"));
    let rt = render_runtime_text(&[RuntimeRecord::new("DT", 0.25, 0.5)]);
    assert!(rt.lines().nth(2).unwrap().ends_with("0.750"));
}

#[test]
fn time_phase_measures_sleep() {
    let ((), s) = time_phase("sleep", || {
        std::thread::sleep(std::time::Duration::from_millis(100));
        Ok(())
    })
    .unwrap();
    assert!((s - 0.1).abs() < 0.05, "{s}");
}

#[test]
fn time_phase_wraps_failures() {
    let out: Result<((), f64), Error> = time_phase("fit", || Err(Error::Config("boom".into())));
    match out {
        Err(Error::Phase { label, seconds, source }) => {
            assert_eq!(label, "fit");
            assert!(seconds >= 0.0);
            assert!(matches!(*source, Error::Config(_)));
        }
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #[test]
    fn report_matches_recount((y_true, y_pred) in labelled(4)) {
        let r = report(&y_true, &y_pred, 4);
        let o = recount(&y_true, &y_pred, 4);
        prop_assert_eq!(r.accuracy, o.accuracy);
        for (k, m) in r.per_class.iter().enumerate() {
            prop_assert_eq!(m.precision, o.precision[k]);
            prop_assert_eq!(m.recall, o.recall[k]);
            prop_assert_eq!(m.f1, o.f1[k]);
            prop_assert_eq!(m.support, o.support[k]);
        }
        prop_assert_eq!(r.weighted.precision, o.weighted_precision);
        prop_assert_eq!(r.weighted.recall, o.weighted_recall);
        prop_assert_eq!(r.weighted.f1, o.weighted_f1);
    }

    #[test]
    fn micro_averages_equal_accuracy((y_true, y_pred) in labelled(3)) {
        let r = report(&y_true, &y_pred, 3);
        prop_assert_eq!(r.micro.precision, r.accuracy);
        prop_assert_eq!(r.micro.recall, r.accuracy);
        prop_assert!((r.micro.f1 - r.accuracy).abs() < 1e-15);
        prop_assert!((r.weighted.recall - r.accuracy).abs() < 1e-12);
        prop_assert_eq!(r.confusion.total() as usize, y_true.len());
    }

    #[test]
    fn report_ignores_row_order((y_true, y_pred) in labelled(3), rot in 0usize..200) {
        let n = y_true.len();
        let k = rot % n;
        let mut t = y_true.clone();
        let mut p = y_pred.clone();
        t.rotate_left(k);
        p.rotate_left(k);
        t.reverse();
        p.reverse();
        prop_assert_eq!(report(&y_true, &y_pred, 3), report(&t, &p, 3));
    }

    #[test]
    fn scores_are_bounded((y_true, y_pred) in labelled(5)) {
        let r = report(&y_true, &y_pred, 5);
        for m in &r.per_class {
            for v in [m.precision, m.recall, m.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!(m.f1 <= m.precision.max(m.recall) + 1e-15);
        }
    }
}
