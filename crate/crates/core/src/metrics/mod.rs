//! Confusion matrices, metric reports, timing and rankings.

mod confusion;
mod ranking;
mod report;
mod timing;

pub use confusion::{confusion_matrix, ConfusionMatrix};
pub use ranking::{rank_models, ranking_csv, render_ranking_text, render_runtime_text, RankingRow, RuntimeRecord};
pub use report::{classification_report, Averages, ClassMetrics, MetricReport};
pub use timing::time_phase;

use crate::Result;

/// Confusion matrix plus report for a label vector pair.
pub fn evaluate(y_true: &[usize], y_pred: &[usize], class_names: &[String]) -> Result<MetricReport> {
    let cm = confusion_matrix(y_true, y_pred, class_names.len())?.with_class_names(class_names)?;
    classification_report(&cm)
}
