#![allow(dead_code)]

use idsemble::flowdata::FeatureMatrix;
use idsemble::seed;
use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::Rng;

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn matrix(x: Array2<f64>, y: Vec<usize>, n_classes: usize) -> FeatureMatrix {
    let d = x.ncols();
    FeatureMatrix::new(x, y, names("f", d), names("c", n_classes)).unwrap()
}

/// Gaussian blobs around class centres `spread * (c, c, ...)` with unit noise.
pub fn blobs(n: usize, d: usize, n_classes: usize, spread: f64, seed_value: u64) -> FeatureMatrix {
    let mut rng = seed::rng(seed_value);
    let y: Vec<usize> = (0..n).map(|i| i % n_classes).collect();
    let x = Array2::from_shape_fn((n, d), |(i, j)| {
        let u: f64 = rng.random_range(-1.0..1.0);
        spread * ((y[i] + j) % n_classes) as f64 + u
    });
    matrix(x, y, n_classes)
}

/// Small integer-valued features so distance and split ties are common.
pub fn integer_grid(n: usize, d: usize, n_classes: usize, levels: i32, seed_value: u64) -> FeatureMatrix {
    let mut rng = seed::rng(seed_value);
    let x = Array2::from_shape_fn((n, d), |_| rng.random_range(0..levels) as f64);
    let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..n_classes)).collect();
    matrix(x, y, n_classes)
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

/// Central finite differences of a scalar function.
pub fn central_differences(f: impl Fn(&[f64]) -> f64, params: &[f64], h: f64) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..p.len())
        .map(|i| {
            let orig = p[i];
            p[i] = orig + h;
            let up = f(&p);
            p[i] = orig - h;
            let down = f(&p);
            p[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `max_i |a_i - b_i| / max(max_i |a_i|, max_i |b_i|, 1e-8)`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(1e-8f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

/// Exhaustive neighbour search: sort all rows by (squared distance, index)
/// and count labels among the first `k`.
pub fn knn_oracle(points: ArrayView2<'_, f64>, labels: &[usize], n_classes: usize, k: usize, q: ArrayView1<'_, f64>) -> Vec<f64> {
    let mut all: Vec<(f64, usize)> = points
        .outer_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut s = 0.0;
            for j in 0..p.len() {
                let diff = p[j] - q[j];
                s += diff * diff;
            }
            (s, i)
        })
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut counts = vec![0.0; n_classes];
    for &(_, i) in &all[..k] {
        counts[labels[i]] += 1.0;
    }
    counts.iter().map(|c| c / k as f64).collect()
}

/// First index of the maximum.
pub fn first_argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

/// Metrics recomputed straight from label vectors.
pub struct Recount {
    pub accuracy: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub support: Vec<u64>,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
}

pub fn recount(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Recount {
    let n = y_true.len();
    let mut precision = Vec::new();
    let mut recall = Vec::new();
    let mut f1 = Vec::new();
    let mut support = Vec::new();
    for c in 0..n_classes {
        let tp = (0..n).filter(|&i| y_true[i] == c && y_pred[i] == c).count() as f64;
        let predicted = y_pred.iter().filter(|&&p| p == c).count() as f64;
        let actual = y_true.iter().filter(|&&t| t == c).count() as f64;
        let p = if predicted == 0.0 { 0.0 } else { tp / predicted };
        let r = if actual == 0.0 { 0.0 } else { tp / actual };
        let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        precision.push(p);
        recall.push(r);
        f1.push(f);
        support.push(actual as u64);
    }
    let weighted = |v: &[f64]| v.iter().zip(&support).map(|(m, s)| m * *s as f64).sum::<f64>() / n as f64;
    Recount {
        accuracy: (0..n).filter(|&i| y_true[i] == y_pred[i]).count() as f64 / n as f64,
        weighted_precision: weighted(&precision),
        weighted_recall: weighted(&recall),
        weighted_f1: weighted(&f1),
        precision,
        recall,
        f1,
        support,
    }
}
