//! k-nearest neighbours (Euclidean, standardised features).

use ndarray::{Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::flowdata::FeatureMatrix;
use crate::numcore::{fit_scaler, Scaler};
use crate::{Classifier, Error, Model, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnConfig {
    pub k: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig { k: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnClassifier {
    pub k: usize,
    pub scaler: Scaler,
    /// Standardised training rows.
    pub points: Array2<f64>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
}

/// Squared Euclidean distance, summed in feature order.
pub fn squared_distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(p, q)| (p - q) * (p - q)).sum()
}

impl KnnClassifier {
    pub fn fit(train: &FeatureMatrix, cfg: &KnnConfig) -> Result<Self> {
        let n = train.n_samples();
        if cfg.k == 0 || cfg.k > n {
            return Err(Error::Config(format!("knn: k must lie in 1..={n}, got {}", cfg.k)));
        }
        let scaler = fit_scaler(train.x())?;
        let points = scaler.transform(train.x())?;
        Ok(KnnClassifier { k: cfg.k, scaler, points, labels: train.y().to_vec(), n_classes: train.n_classes() })
    }

    /// Training-row indices of the `k` nearest neighbours of a standardised
    /// query, ordered by (distance, index).
    pub fn neighbours(&self, q: ArrayView1<'_, f64>) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> =
            self.points.outer_iter().enumerate().map(|(i, p)| (squared_distance(q, p), i)).collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < d.len() {
            d.select_nth_unstable_by(self.k - 1, cmp);
            d.truncate(self.k);
        }
        d.sort_unstable_by(cmp);
        d.into_iter().map(|(_, i)| i).collect()
    }
}

impl Classifier for KnnClassifier {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.points.ncols()
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let xs = self.scaler.transform(x)?;
        let rows: Vec<Vec<f64>> = (0..xs.nrows())
            .into_par_iter()
            .map(|r| {
                let mut counts = vec![0.0; self.n_classes];
                for i in self.neighbours(xs.row(r)) {
                    counts[self.labels[i]] += 1.0;
                }
                counts.iter_mut().for_each(|c| *c /= self.k as f64);
                counts
            })
            .collect();
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Ok(Array2::from_shape_vec((xs.nrows(), self.n_classes), flat).expect("shape"))
    }
}

pub fn fit_knn(train: &FeatureMatrix, cfg: &KnnConfig) -> Result<Model> {
    Ok(Model::Knn(KnnClassifier::fit(train, cfg)?))
}
