use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use crate::{seed, Error, Result};

/// Synthetic flow-like dataset.
///
/// Each class is a unit-variance Gaussian cluster. On every feature the
/// class centroids sit on distinct levels `separability * k` (`k` a per-
/// feature random permutation of `0..C`), so any two centroids differ by at
/// least `separability` along every axis; `separability = 0` makes all
/// classes identically distributed.
///
/// Optionally a class-independent fraction of rows gets one feature pushed
/// to a huge magnitude, mimicking the heavy tails of byte/packet-rate
/// columns in real flow exports. Tree learners are unaffected by this;
/// scale-sensitive learners see the class structure squeezed into a tiny
/// range after standardisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub n_samples: usize,
    pub class_mix: Vec<f64>,
    pub separability: f64,
    pub n_features: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outlier_fraction: f64,
    #[serde(default = "default_magnitude")]
    pub outlier_magnitude: f64,
    #[serde(default)]
    pub class_names: Vec<String>,
}

fn default_magnitude() -> f64 {
    1e8
}

impl SynthSpec {
    pub fn new(n_samples: usize, class_mix: Vec<f64>, separability: f64, n_features: usize, seed: u64) -> Self {
        SynthSpec {
            n_samples,
            class_mix,
            separability,
            n_features,
            seed,
            outlier_fraction: 0.0,
            outlier_magnitude: default_magnitude(),
            class_names: Vec::new(),
        }
    }

    /// Three-class mirror of the RoEduNet-SIMARGL2021 corpus: its class
    /// imbalance (62.20 / 24.53 / 13.27 %) with heavy-tailed contamination.
    pub fn roedunet_mirror(n_samples: usize, seed: u64) -> Self {
        SynthSpec {
            outlier_fraction: 0.01,
            class_names: vec!["Normal".into(), "DoS".into(), "PortScan".into()],
            ..SynthSpec::new(n_samples, vec![0.6220, 0.2453, 0.1327], 10.0, 10, seed)
        }
    }

    fn validate(&self) -> Result<()> {
        let sum: f64 = self.class_mix.iter().sum();
        if self.class_mix.is_empty() || self.class_mix.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > 1e-6 {
            return Err(Error::Config(format!(
                "class_mix must be non-negative proportions summing to 1 (sum = {sum})"
            )));
        }
        if self.n_samples == 0 || self.n_features == 0 {
            return Err(Error::Config("n_samples and n_features must be positive".into()));
        }
        if !(self.separability >= 0.0) || !self.separability.is_finite() {
            return Err(Error::Config("separability must be a finite value >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.outlier_fraction) {
            return Err(Error::Config("outlier_fraction must lie in [0, 1]".into()));
        }
        if !self.class_names.is_empty() && self.class_names.len() != self.class_mix.len() {
            return Err(Error::Config("class_names length differs from class_mix".into()));
        }
        Ok(())
    }

    /// Largest-remainder apportionment of `n_samples` over the class mix.
    pub fn class_counts(&self) -> Vec<usize> {
        let n = self.n_samples as f64;
        let raw: Vec<f64> = self.class_mix.iter().map(|p| p * n).collect();
        let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
        let mut short = self.n_samples.saturating_sub(counts.iter().sum());
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| {
            let (ra, rb) = (raw[a] - raw[a].floor(), raw[b] - raw[b].floor());
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &c in order.iter().cycle() {
            if short == 0 {
                break;
            }
            counts[c] += 1;
            short -= 1;
        }
        counts
    }

    pub fn generate(&self) -> Result<FeatureMatrix> {
        self.validate()?;
        let c = self.class_mix.len();
        let d = self.n_features;
        let mut rng = seed::rng(self.seed);

        let mut centroids = Array2::<f64>::zeros((c, d));
        let mut levels: Vec<usize> = (0..c).collect();
        for j in 0..d {
            levels.shuffle(&mut rng);
            for k in 0..c {
                centroids[[k, j]] = self.separability * levels[k] as f64;
            }
        }

        let mut y: Vec<usize> = self
            .class_counts()
            .into_iter()
            .enumerate()
            .flat_map(|(k, n)| std::iter::repeat(k).take(n))
            .collect();
        y.shuffle(&mut rng);

        let mut x = Array2::<f64>::zeros((self.n_samples, d));
        for (i, &k) in y.iter().enumerate() {
            for j in 0..d {
                let z: f64 = rng.sample(StandardNormal);
                x[[i, j]] = centroids[[k, j]] + z;
            }
            if self.outlier_fraction > 0.0 && rng.random::<f64>() < self.outlier_fraction {
                let j = rng.random_range(0..d);
                let z: f64 = rng.sample(StandardNormal);
                x[[i, j]] += self.outlier_magnitude * (1.0 + z.abs());
            }
        }

        let features = (0..d).map(|j| format!("f{j}")).collect();
        let classes = if self.class_names.is_empty() {
            (0..c).map(|k| format!("class{k}")).collect()
        } else {
            self.class_names.clone()
        };
        FeatureMatrix::new(x, y, features, classes)
    }
}

/// Gaussian-cluster dataset without contamination.
pub fn synth_dataset(
    n_samples: usize,
    class_mix: &[f64],
    separability: f64,
    n_features: usize,
    seed: u64,
) -> Result<FeatureMatrix> {
    SynthSpec::new(n_samples, class_mix.to_vec(), separability, n_features, seed).generate()
}
