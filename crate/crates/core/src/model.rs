use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::ensembles::{
    AdaBoostClassifier, BaggingClassifier, BlendingClassifier, GradientBoostClassifier, PcaPipeline,
    RandomForest, StackingClassifier, VotingClassifier,
};
use crate::learners::{DecisionTree, KnnClassifier, LogisticRegression, MlpClassifier};
use crate::{Error, Result};

/// Version written after the magic bytes of a saved model.
pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"IDSMODEL";

/// Scores closer than this to the row maximum count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Index of the largest entry; near-ties resolve to the lowest index.
pub fn argmax_lowest(row: ArrayView1<'_, f64>) -> usize {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = max - TIE_TOLERANCE * max.abs().max(1.0);
    row.iter().position(|&v| v >= cut).unwrap_or(0)
}

pub(crate) fn check_width(expected: usize, x: ArrayView2<'_, f64>) -> Result<()> {
    if x.ncols() != expected {
        return Err(Error::Dimension(format!("expected {expected} feature columns, got {}", x.ncols())));
    }
    Ok(())
}

/// Uniform trained-classifier contract.
pub trait Classifier {
    fn n_classes(&self) -> usize;
    fn n_features(&self) -> usize;
    /// Row-stochastic `n × C` matrix.
    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>>;

    fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
        let p = self.predict_proba(x)?;
        Ok(p.outer_iter().map(argmax_lowest).collect())
    }
}

/// Any trained classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Model {
    DecisionTree(DecisionTree),
    LogisticRegression(LogisticRegression),
    Knn(KnnClassifier),
    Mlp(MlpClassifier),
    RandomForest(RandomForest),
    Bagging(BaggingClassifier),
    AdaBoost(AdaBoostClassifier),
    GradientBoost(GradientBoostClassifier),
    Voting(VotingClassifier),
    Stacking(StackingClassifier),
    Blending(BlendingClassifier),
    Pipeline(PcaPipeline),
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            Model::DecisionTree($m) => $e,
            Model::LogisticRegression($m) => $e,
            Model::Knn($m) => $e,
            Model::Mlp($m) => $e,
            Model::RandomForest($m) => $e,
            Model::Bagging($m) => $e,
            Model::AdaBoost($m) => $e,
            Model::GradientBoost($m) => $e,
            Model::Voting($m) => $e,
            Model::Stacking($m) => $e,
            Model::Blending($m) => $e,
            Model::Pipeline($m) => $e,
        }
    };
}

impl Classifier for Model {
    fn n_classes(&self) -> usize {
        dispatch!(self, m => m.n_classes())
    }

    fn n_features(&self) -> usize {
        dispatch!(self, m => m.n_features())
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        dispatch!(self, m => m.predict_proba(x))
    }

    fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
        dispatch!(self, m => m.predict(x))
    }
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::DecisionTree(_) => "decision_tree",
            Model::LogisticRegression(_) => "logistic_regression",
            Model::Knn(_) => "knn",
            Model::Mlp(_) => "mlp",
            Model::RandomForest(_) => "random_forest",
            Model::Bagging(_) => "bagging",
            Model::AdaBoost(_) => "adaboost",
            Model::GradientBoost(_) => "gradient_boost",
            Model::Voting(_) => "voting",
            Model::Stacking(_) => "stacking",
            Model::Blending(_) => "blending",
            Model::Pipeline(_) => "pipeline",
        }
    }

    /// Writes the versioned binary format; `spec_json` echoes the config.
    pub fn save(&self, path: impl AsRef<Path>, spec_json: Option<String>) -> Result<()> {
        let envelope = ModelEnvelope { format_version: MODEL_FORMAT_VERSION, spec_json, model: self.clone() };
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        envelope.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ModelEnvelope> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        ModelEnvelope::read_from(&mut f)
    }
}

/// Saved model plus format version and config echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEnvelope {
    pub format_version: u32,
    pub spec_json: Option<String>,
    pub model: Model,
}

impl ModelEnvelope {
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&self.format_version.to_le_bytes())?;
        bincode::serialize_into(w, self)?;
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a saved model (bad magic)".into()));
        }
        let mut v = [0u8; 4];
        r.read_exact(&mut v)?;
        let version = u32::from_le_bytes(v);
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported model format version {version} (expected {MODEL_FORMAT_VERSION})"
            )));
        }
        Ok(bincode::deserialize_from(r)?)
    }
}
