//! Multinomial logistic regression on standardised features.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::flowdata::FeatureMatrix;
use crate::numcore::{fit_scaler, softmax_rows, AdamState, Scaler};
use crate::{seed, Classifier, Error, Model, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub max_iters: usize,
    pub l2: f64,
    /// Stop once the loss changes by less than this between iterations.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig { learning_rate: 0.05, max_iters: 100, l2: 1e-4, tol: 1e-6, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub scaler: Scaler,
    /// `d × C`
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub iterations: usize,
    pub final_loss: f64,
}

/// Parameter layout: `W` (`d × C`, row-major) followed by `b` (`C`).
pub fn logistic_param_count(d: usize, c: usize) -> usize {
    d * c + c
}

fn unpack(params: &[f64], d: usize, c: usize) -> (ArrayView2<'_, f64>, &[f64]) {
    let w = ArrayView2::from_shape((d, c), &params[..d * c]).expect("param layout");
    (w, &params[d * c..])
}

/// Mean cross-entropy plus `l2/2 · ||W||²` and its gradient, on already
/// standardised inputs.
pub fn logistic_loss_and_grad(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    n_classes: usize,
    params: &[f64],
    l2: f64,
) -> (f64, Vec<f64>) {
    let (n, d) = x.dim();
    let c = n_classes;
    let (w, b) = unpack(params, d, c);
    let mut z = x.dot(&w);
    z += &ArrayView2::from_shape((1, c), b).unwrap();
    let p = softmax_rows(z.view());

    let mut loss = 0.0;
    let mut dz = p;
    for (i, &yi) in y.iter().enumerate() {
        loss -= dz[[i, yi]].max(f64::MIN_POSITIVE).ln();
        dz[[i, yi]] -= 1.0;
    }
    let inv_n = 1.0 / n as f64;
    loss *= inv_n;
    dz *= inv_n;
    loss += 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>();

    let mut gw = x.t().dot(&dz);
    gw.scaled_add(l2, &w);
    let gb = dz.sum_axis(Axis(0));
    let mut grad = Vec::with_capacity(params.len());
    grad.extend(gw.iter());
    grad.extend(gb.iter());
    (loss, grad)
}

pub(crate) fn glorot_init(rng: &mut impl Rng, fan_in: usize, fan_out: usize, count: usize) -> Vec<f64> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..count).map(|_| rng.random_range(-limit..=limit)).collect()
}

impl LogisticRegression {
    pub fn fit(train: &FeatureMatrix, cfg: &LogisticConfig) -> Result<Self> {
        let (n, d) = (train.n_samples(), train.n_features());
        let c = train.n_classes();
        if n < c.max(2) {
            return Err(Error::Precondition(format!("logistic regression needs at least {c} rows, got {n}")));
        }
        if cfg.max_iters == 0 || !(cfg.learning_rate > 0.0) || !(cfg.l2 >= 0.0) {
            return Err(Error::Config("logistic regression: max_iters and learning_rate must be positive, l2 >= 0".into()));
        }
        let scaler = fit_scaler(train.x())?;
        let xs = scaler.transform(train.x())?;
        let mut rng = seed::rng(cfg.seed);
        let mut params = glorot_init(&mut rng, d, c, d * c);
        params.extend(glorot_init(&mut rng, d, c, c));
        let mut adam = AdamState::new(params.len());

        let mut prev = f64::INFINITY;
        let mut iterations = 0;
        let mut final_loss = f64::NAN;
        for _ in 0..cfg.max_iters {
            let (loss, grad) = logistic_loss_and_grad(xs.view(), train.y(), c, &params, cfg.l2);
            if !loss.is_finite() {
                return Err(Error::Divergence(format!("logistic regression loss became {loss}")));
            }
            adam.step(&mut params, &grad, cfg.learning_rate)?;
            iterations += 1;
            final_loss = loss;
            if (prev - loss).abs() < cfg.tol {
                break;
            }
            prev = loss;
        }
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence("logistic regression weights became non-finite".into()));
        }
        let (w, b) = unpack(&params, d, c);
        Ok(LogisticRegression {
            scaler,
            weights: w.to_owned(),
            bias: Array1::from(b.to_vec()),
            iterations,
            final_loss,
        })
    }

    pub fn params(&self) -> Vec<f64> {
        self.weights.iter().chain(self.bias.iter()).copied().collect()
    }
}

impl Classifier for LogisticRegression {
    fn n_classes(&self) -> usize {
        self.bias.len()
    }

    fn n_features(&self) -> usize {
        self.weights.nrows()
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let xs = self.scaler.transform(x)?;
        let mut z = xs.dot(&self.weights);
        z += &self.bias;
        Ok(softmax_rows(z.view()))
    }
}

pub fn fit_logistic_regression(train: &FeatureMatrix, cfg: &LogisticConfig) -> Result<Model> {
    Ok(Model::LogisticRegression(LogisticRegression::fit(train, cfg)?))
}
