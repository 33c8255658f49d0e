use serde::{Deserialize, Serialize};

use super::confusion::ConfusionMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    /// Support-weighted; the ranking key.
    pub weighted: Averages,
    pub macro_avg: Averages,
    pub micro: Averages,
    /// Number of 0/0 ratios that were defined as 0.
    pub zero_division: usize,
    pub confusion: ConfusionMatrix,
}

fn ratio(num: f64, den: f64, zero_division: &mut usize) -> f64 {
    if den == 0.0 {
        *zero_division += 1;
        0.0
    } else {
        num / den
    }
}

/// F1 as the harmonic mean `2PR / (P + R)`.
fn harmonic(p: f64, r: f64, zero_division: &mut usize) -> f64 {
    ratio(2.0 * p * r, p + r, zero_division)
}

pub fn classification_report(cm: &ConfusionMatrix) -> Result<MetricReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Precondition("classification report of an empty confusion matrix".into()));
    }
    let n = total as f64;
    let c = cm.n_classes();
    let mut zd = 0;
    let mut per_class = Vec::with_capacity(c);
    for i in 0..c {
        let tp = cm.tp(i) as f64;
        let precision = ratio(tp, tp + cm.fp(i) as f64, &mut zd);
        let recall = ratio(tp, tp + cm.fn_(i) as f64, &mut zd);
        let f1 = harmonic(precision, recall, &mut zd);
        per_class.push(ClassMetrics { name: cm.class_names[i].clone(), precision, recall, f1, support: cm.support(i) });
    }

    let mut weighted = Averages { precision: 0.0, recall: 0.0, f1: 0.0 };
    let mut macro_avg = weighted;
    for m in &per_class {
        let s = m.support as f64;
        weighted.precision += s * m.precision;
        weighted.recall += s * m.recall;
        weighted.f1 += s * m.f1;
        macro_avg.precision += m.precision;
        macro_avg.recall += m.recall;
        macro_avg.f1 += m.f1;
    }
    weighted.precision /= n;
    weighted.recall /= n;
    weighted.f1 /= n;
    macro_avg.precision /= c as f64;
    macro_avg.recall /= c as f64;
    macro_avg.f1 /= c as f64;

    let tp: u64 = (0..c).map(|i| cm.tp(i)).sum();
    let fp: u64 = (0..c).map(|i| cm.fp(i)).sum();
    let fn_: u64 = (0..c).map(|i| cm.fn_(i)).sum();
    let mp = ratio(tp as f64, (tp + fp) as f64, &mut zd);
    let mr = ratio(tp as f64, (tp + fn_) as f64, &mut zd);
    let micro = Averages { precision: mp, recall: mr, f1: harmonic(mp, mr, &mut zd) };

    Ok(MetricReport {
        accuracy: cm.accuracy(),
        per_class,
        weighted,
        macro_avg,
        micro,
        zero_division: zd,
        confusion: cm.clone(),
    })
}
