//! Multi-layer perceptron: ReLU hidden layers, softmax output, Adam.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::logistic::glorot_init;
use crate::flowdata::FeatureMatrix;
use crate::numcore::{fit_scaler, softmax_rows, AdamState, Scaler};
use crate::{seed, Classifier, Error, Model, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    /// L2 penalty, scaled by `1 / (2 · batch rows)`.
    pub alpha: f64,
    pub learning_rate: f64,
    /// Epoch cap.
    pub max_iters: usize,
    /// Upper bound of the `min(batch_size, n)` rule.
    pub batch_size: usize,
    pub tol: f64,
    pub n_iter_no_change: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: vec![50, 50],
            alpha: 1e-4,
            learning_rate: 1e-3,
            max_iters: 1000,
            batch_size: 200,
            tol: 1e-4,
            n_iter_no_change: 10,
            seed: 42,
        }
    }
}

/// Layer weights and biases, `W_l` as `fan_in × fan_out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl MlpParams {
    /// Flat layout: for each layer `W` (row-major) then `b`.
    pub fn from_flat(sizes: &[usize], flat: &[f64]) -> Self {
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        let mut off = 0;
        for w in sizes.windows(2) {
            let (i, o) = (w[0], w[1]);
            weights.push(Array2::from_shape_vec((i, o), flat[off..off + i * o].to_vec()).unwrap());
            off += i * o;
            biases.push(Array1::from(flat[off..off + o].to_vec()));
            off += o;
        }
        MlpParams { weights, biases }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }
}

pub fn mlp_param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

fn layer_views<'a>(sizes: &[usize], flat: &'a [f64]) -> Vec<(ArrayView2<'a, f64>, ArrayView2<'a, f64>)> {
    let mut out = Vec::new();
    let mut off = 0;
    for w in sizes.windows(2) {
        let (i, o) = (w[0], w[1]);
        let wv = ArrayView2::from_shape((i, o), &flat[off..off + i * o]).unwrap();
        off += i * o;
        let bv = ArrayView2::from_shape((1, o), &flat[off..off + o]).unwrap();
        off += o;
        out.push((wv, bv));
    }
    out
}

fn forward(sizes: &[usize], flat: &[f64], x: ArrayView2<'_, f64>) -> Vec<Array2<f64>> {
    let layers = layer_views(sizes, flat);
    let last = layers.len() - 1;
    let mut acts = vec![x.to_owned()];
    for (l, (w, b)) in layers.iter().enumerate() {
        let mut z = acts[l].dot(w);
        z += b;
        if l < last {
            z.mapv_inplace(|v| v.max(0.0));
            acts.push(z);
        } else {
            acts.push(softmax_rows(z.view()));
        }
    }
    acts
}

/// Mean cross-entropy plus `alpha / (2m) · Σ||W||²` over a batch of `m`
/// standardised rows, and its gradient in the flat layout.
pub fn mlp_loss_and_grad(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    sizes: &[usize],
    params: &[f64],
    alpha: f64,
) -> (f64, Vec<f64>) {
    let m = x.nrows() as f64;
    let acts = forward(sizes, params, x);
    let layers = layer_views(sizes, params);
    let n_layers = layers.len();

    let mut delta = acts[n_layers].clone();
    let mut loss = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        loss -= delta[[i, yi]].max(f64::MIN_POSITIVE).ln();
        delta[[i, yi]] -= 1.0;
    }
    loss /= m;
    delta /= m;
    let sq: f64 = layers.iter().map(|(w, _)| w.iter().map(|v| v * v).sum::<f64>()).sum();
    loss += alpha / (2.0 * m) * sq;

    let mut grads: Vec<(Array2<f64>, Array1<f64>)> = Vec::with_capacity(n_layers);
    for l in (0..n_layers).rev() {
        let (w, _) = &layers[l];
        let mut gw = acts[l].t().dot(&delta);
        gw.scaled_add(alpha / m, w);
        let gb = delta.sum_axis(Axis(0));
        if l > 0 {
            let mut back = delta.dot(&w.t());
            back.zip_mut_with(&acts[l], |g, &a| {
                if a <= 0.0 {
                    *g = 0.0;
                }
            });
            delta = back;
        }
        grads.push((gw, gb));
    }
    grads.reverse();
    let mut flat = Vec::with_capacity(params.len());
    for (gw, gb) in grads {
        flat.extend(gw.iter());
        flat.extend(gb.iter());
    }
    (loss, flat)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpClassifier {
    pub scaler: Scaler,
    pub sizes: Vec<usize>,
    pub params: MlpParams,
    pub epochs: usize,
    pub loss_curve: Vec<f64>,
}

impl MlpClassifier {
    pub fn fit(train: &FeatureMatrix, cfg: &MlpConfig) -> Result<Self> {
        let n = train.n_samples();
        if n < 2 {
            return Err(Error::Precondition("mlp needs at least 2 rows".into()));
        }
        if cfg.max_iters == 0 || cfg.batch_size == 0 || cfg.hidden.iter().any(|&h| h == 0) {
            return Err(Error::Config("mlp: max_iters, batch_size and layer widths must be positive".into()));
        }
        if !(cfg.alpha >= 0.0) || !(cfg.learning_rate > 0.0) {
            return Err(Error::Config("mlp: alpha must be >= 0 and learning_rate > 0".into()));
        }
        let scaler = fit_scaler(train.x())?;
        let xs = scaler.transform(train.x())?;
        let mut sizes = vec![train.n_features()];
        sizes.extend(&cfg.hidden);
        sizes.push(train.n_classes());

        let mut rng = seed::rng(cfg.seed);
        let mut params = Vec::with_capacity(mlp_param_count(&sizes));
        for w in sizes.windows(2) {
            params.extend(glorot_init(&mut rng, w[0], w[1], w[0] * w[1]));
            params.extend(glorot_init(&mut rng, w[0], w[1], w[1]));
        }
        let mut adam = AdamState::new(params.len());

        let batch = cfg.batch_size.min(n);
        let d = train.n_features();
        let mut order: Vec<usize> = (0..n).collect();
        let mut xb = Array2::<f64>::zeros((batch, d));
        let mut yb = vec![0usize; batch];
        let mut best = f64::INFINITY;
        let mut stale = 0;
        let mut loss_curve = Vec::new();

        for _ in 0..cfg.max_iters {
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            for chunk in order.chunks(batch) {
                let m = chunk.len();
                for (r, &i) in chunk.iter().enumerate() {
                    xb.row_mut(r).assign(&xs.row(i));
                    yb[r] = train.y()[i];
                }
                let (loss, grad) =
                    mlp_loss_and_grad(xb.slice(s![..m, ..]), &yb[..m], &sizes, &params, cfg.alpha);
                if !loss.is_finite() {
                    return Err(Error::Divergence(format!("mlp loss became {loss}")));
                }
                adam.step(&mut params, &grad, cfg.learning_rate)?;
                epoch_loss += loss * m as f64;
            }
            epoch_loss /= n as f64;
            loss_curve.push(epoch_loss);
            if epoch_loss > best - cfg.tol {
                stale += 1;
            } else {
                stale = 0;
            }
            best = best.min(epoch_loss);
            if stale > cfg.n_iter_no_change {
                break;
            }
        }
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence("mlp weights became non-finite".into()));
        }
        Ok(MlpClassifier {
            scaler,
            params: MlpParams::from_flat(&sizes, &params),
            sizes,
            epochs: loss_curve.len(),
            loss_curve,
        })
    }
}

impl Classifier for MlpClassifier {
    fn n_classes(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    fn n_features(&self) -> usize {
        self.sizes[0]
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let xs = self.scaler.transform(x)?;
        let flat = self.params.to_flat();
        Ok(forward(&self.sizes, &flat, xs.view()).pop().unwrap())
    }
}

pub fn fit_mlp(train: &FeatureMatrix, cfg: &MlpConfig) -> Result<Model> {
    Ok(Model::Mlp(MlpClassifier::fit(train, cfg)?))
}
