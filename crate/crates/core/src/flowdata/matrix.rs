use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::table::RawTable;
use crate::{Error, Result};

/// Dense, finite feature table with aligned class indices.
///
/// `row_ids` identify each row's origin in the preprocessed dataset and
/// survive splitting, subsampling and resampling, which is what the
/// leakage checks in stacking and the benchmark runner rely on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    x: Array2<f64>,
    y: Vec<usize>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
    row_ids: Vec<usize>,
}

impl FeatureMatrix {
    pub fn new(
        x: Array2<f64>,
        y: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let ids = (0..y.len()).collect();
        Self::with_row_ids(x, y, feature_names, class_names, ids)
    }

    pub fn with_row_ids(
        x: Array2<f64>,
        y: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
        row_ids: Vec<usize>,
    ) -> Result<Self> {
        let (n, d) = x.dim();
        if n == 0 || d == 0 {
            return Err(Error::Dimension(format!("feature matrix must be non-empty, got {n}x{d}")));
        }
        if y.len() != n || row_ids.len() != n {
            return Err(Error::Dimension(format!(
                "{n} rows but {} labels and {} row ids",
                y.len(),
                row_ids.len()
            )));
        }
        if feature_names.len() != d {
            return Err(Error::Dimension(format!(
                "{d} columns but {} feature names",
                feature_names.len()
            )));
        }
        if class_names.is_empty() {
            return Err(Error::Dimension("no class names".into()));
        }
        if let Some(&bad) = y.iter().find(|&&c| c >= class_names.len()) {
            return Err(Error::LabelRange { value: bad, classes: class_names.len() });
        }
        if let Some(((r, c), v)) = x.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Dimension(format!("non-finite value {v} at ({r}, {c})")));
        }
        Ok(FeatureMatrix { x, y, feature_names, class_names, row_ids })
    }

    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    pub fn n_samples(&self) -> usize {
        self.y.len()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &c in &self.y {
            counts[c] += 1;
        }
        counts
    }

    /// Rows in the given order; repeated indices are allowed (bootstrap).
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Dimension("row selection is empty".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n_samples()) {
            return Err(Error::Dimension(format!("row {bad} out of range")));
        }
        Ok(FeatureMatrix {
            x: self.x.select(Axis(0), indices),
            y: indices.iter().map(|&i| self.y[i]).collect(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
            row_ids: indices.iter().map(|&i| self.row_ids[i]).collect(),
        })
    }

    /// Same rows and labels with a replacement feature block (e.g. PCA
    /// scores).
    pub fn with_features(&self, x: Array2<f64>, feature_names: Vec<String>) -> Result<Self> {
        if x.nrows() != self.n_samples() {
            return Err(Error::Dimension(format!(
                "replacement has {} rows, expected {}",
                x.nrows(),
                self.n_samples()
            )));
        }
        Self::with_row_ids(x, self.y.clone(), feature_names, self.class_names.clone(), self.row_ids.clone())
    }

    /// Renders the matrix back into a raw table (numbers in shortest
    /// round-trip form, labels as class names) so it can be preprocessed
    /// again.
    pub fn to_raw_table(&self, label_column: &str) -> RawTable {
        let mut header = self.feature_names.clone();
        header.push(label_column.to_string());
        let rows = self
            .x
            .outer_iter()
            .zip(&self.y)
            .map(|(row, &c)| {
                let mut cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                cells.push(self.class_names[c].clone());
                cells
            })
            .collect();
        RawTable { header, rows, source_path: "<memory>".into() }
    }
}
