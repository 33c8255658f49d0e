use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Top-`k` principal axes of a centred data matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    /// `k × d`, orthonormal rows.
    pub components: Array2<f64>,
    pub mean: Array1<f64>,
    /// Eigenvalues of the sample covariance, nonincreasing.
    pub explained_variance: Array1<f64>,
}

/// Eigen-decomposes the sample covariance (denominator `n - 1`) and keeps
/// the `k` leading eigenvectors. Each component is sign-fixed so its
/// largest-magnitude entry is positive.
pub fn pca_fit(x: ArrayView2<'_, f64>, k: usize) -> Result<PcaModel> {
    let (n, d) = x.dim();
    if k == 0 || n < 2 || k > (n - 1).min(d) {
        return Err(Error::Dimension(format!(
            "pca: k = {k} outside [1, min(n - 1, d)] for a {n}x{d} matrix"
        )));
    }
    let mean = x.mean_axis(Axis(0)).expect("n >= 2");
    let centred = &x - &mean;
    let cov = centred.t().dot(&centred) / (n as f64 - 1.0);
    let sym = DMatrix::from_fn(d, d, |i, j| cov[[i, j]]);
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut components = Array2::zeros((k, d));
    let mut explained = Array1::zeros(k);
    for (row, &idx) in order.iter().take(k).enumerate() {
        let v = eig.eigenvectors.column(idx);
        let mut pivot = 0;
        for j in 1..d {
            if v[j].abs() > v[pivot].abs() {
                pivot = j;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..d {
            components[[row, j]] = sign * v[j];
        }
        explained[row] = eig.eigenvalues[idx].max(0.0);
    }
    Ok(PcaModel { components, mean, explained_variance: explained })
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.components.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.components.ncols()
    }

    /// Centres with the fitted mean and projects onto the components.
    pub fn transform(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_features() {
            return Err(Error::Dimension(format!(
                "pca fitted on {} columns, got {}",
                self.n_features(),
                x.ncols()
            )));
        }
        Ok((&x - &self.mean).dot(&self.components.t()))
    }

    /// Maps component scores back to the input space.
    pub fn inverse_transform(&self, scores: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if scores.ncols() != self.n_components() {
            return Err(Error::Dimension("score width differs from component count".into()));
        }
        Ok(scores.dot(&self.components) + &self.mean)
    }
}

pub fn pca_transform(model: &PcaModel, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    model.transform(x)
}
