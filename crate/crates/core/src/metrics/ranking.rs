use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::report::MetricReport;
use crate::{Error, Result};

/// Wall-clock seconds for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRecord {
    pub model: String,
    pub fit_seconds: f64,
    pub predict_seconds: f64,
    pub total_seconds: f64,
}

impl RuntimeRecord {
    pub fn new(model: impl Into<String>, fit_seconds: f64, predict_seconds: f64) -> Self {
        RuntimeRecord { model: model.into(), fit_seconds, predict_seconds, total_seconds: fit_seconds + predict_seconds }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub rank: usize,
    pub name: String,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub seconds: f64,
}

/// Weighted-F1 descending; ties by higher accuracy, lower total seconds,
/// then name.
pub fn rank_models(entries: &[(String, MetricReport, RuntimeRecord)]) -> Result<Vec<RankingRow>> {
    if entries.is_empty() {
        return Err(Error::Precondition("nothing to rank".into()));
    }
    let mut rows: Vec<RankingRow> = entries
        .iter()
        .map(|(name, r, t)| RankingRow {
            rank: 0,
            name: name.clone(),
            accuracy: r.accuracy,
            precision: r.weighted.precision,
            recall: r.weighted.recall,
            f1: r.weighted.f1,
            seconds: t.total_seconds,
        })
        .collect();
    rows.sort_by(compare_rows);
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(rows)
}

fn compare_rows(a: &RankingRow, b: &RankingRow) -> Ordering {
    b.f1
        .total_cmp(&a.f1)
        .then(b.accuracy.total_cmp(&a.accuracy))
        .then(a.seconds.total_cmp(&b.seconds))
        .then_with(|| a.name.cmp(&b.name))
}

/// Aligned text table `Models | ACC | PRE | REC | F1`.
pub fn render_ranking_text(rows: &[RankingRow]) -> String {
    let cells: Vec<[String; 5]> = rows
        .iter()
        .map(|r| {
            [
                r.name.clone(),
                format!("{:.4}", r.accuracy),
                format!("{:.4}", r.precision),
                format!("{:.4}", r.recall),
                format!("{:.4}", r.f1),
            ]
        })
        .collect();
    render_table(&["Models", "ACC", "PRE", "REC", "F1"], &cells)
}

/// Aligned text table of fit / predict / total seconds.
pub fn render_runtime_text(records: &[RuntimeRecord]) -> String {
    let cells: Vec<[String; 4]> = records
        .iter()
        .map(|r| {
            [
                r.model.clone(),
                format!("{:.3}", r.fit_seconds),
                format!("{:.3}", r.predict_seconds),
                format!("{:.3}", r.total_seconds),
            ]
        })
        .collect();
    render_table(&["Models", "Train (s)", "Test (s)", "Total (s)"], &cells)
}

fn render_table<const N: usize>(header: &[&str; N], rows: &[[String; N]]) -> String {
    let mut width = header.map(str::len);
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { format!("{c:<w$}", w = width[i]) } else { format!("{c:>w$}", w = width[i]) })
            .collect();
        parts.join(" | ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
    out += &(rule.join("-+-") + "\n");
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

/// CSV with columns `rank,model,accuracy,precision,recall,f1[,seconds]`.
pub fn ranking_csv(rows: &[RankingRow], with_seconds: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["rank", "model", "accuracy", "precision", "recall", "f1"];
    if with_seconds {
        header.push("seconds");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.rank.to_string(),
            r.name.clone(),
            format!("{:.6}", r.accuracy),
            format!("{:.6}", r.precision),
            format!("{:.6}", r.recall),
            format!("{:.6}", r.f1),
        ];
        if with_seconds {
            rec.push(format!("{:.6}", r.seconds));
        }
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
