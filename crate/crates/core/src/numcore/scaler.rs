use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Per-column standardisation. Zero standard deviations are stored as 1 so
/// constant columns map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub means: Array1<f64>,
    pub stds: Array1<f64>,
}

/// Population mean and standard deviation of every column.
pub fn fit_scaler(x: ArrayView2<'_, f64>) -> Result<Scaler> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::Precondition(format!("scaler needs at least 2 rows, got {n}")));
    }
    let d = x.ncols();
    let mut means = Array1::zeros(d);
    let mut stds = Array1::zeros(d);
    for (j, col) in x.axis_iter(Axis(1)).enumerate() {
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        means[j] = mean;
        stds[j] = if sd > 0.0 && sd.is_finite() { sd } else { 1.0 };
    }
    Ok(Scaler { means, stds })
}

impl Scaler {
    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_features() {
            return Err(Error::Dimension(format!(
                "scaler fitted on {} columns, got {}",
                self.n_features(),
                x.ncols()
            )));
        }
        let mut out = x.to_owned();
        for mut row in out.rows_mut() {
            for ((v, m), s) in row.iter_mut().zip(&self.means).zip(&self.stds) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }

    pub fn inverse_transform(&self, z: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if z.ncols() != self.n_features() {
            return Err(Error::Dimension("column count mismatch".into()));
        }
        let mut out = z.to_owned();
        for mut row in out.rows_mut() {
            for ((v, m), s) in row.iter_mut().zip(&self.means).zip(&self.stds) {
                *v = *v * s + m;
            }
        }
        Ok(out)
    }
}

pub fn apply_scaler(scaler: &Scaler, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    scaler.transform(x)
}
