use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ensembles::EnsembleSpec;
use crate::flowdata::SynthSpec;
use crate::learners::LearnerSpec;
use crate::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;
pub const ENV_OUT_DIR: &str = "IDSEMBLE_OUT_DIR";
pub const ENV_THREADS: &str = "IDSEMBLE_THREADS";

/// Experiment description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default = "default_name")]
    pub name: String,
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker threads; all available cores when unset.
    pub threads: Option<usize>,
    pub output_dir: Option<PathBuf>,
    /// Training-set fraction kept for methods flagged `heavy`.
    pub subsample_fraction: Option<f64>,
    /// Train methods concurrently; runtime tables are then not emitted.
    #[serde(default)]
    pub parallel_methods: bool,
    #[serde(default)]
    pub methods: Vec<MethodConfig>,
}

fn default_name() -> String {
    "experiment".into()
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DatasetConfig {
    Csv {
        /// Dataset schema TOML.
        schema: PathBuf,
        /// Replaces the schema's own file list when non-empty.
        #[serde(default)]
        files: Vec<PathBuf>,
    },
    Synthetic(SynthSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub test_fraction: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { test_fraction: 0.3 }
    }
}

/// One benchmarked method: exactly one of `learner` / `ensemble`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub name: String,
    #[serde(default)]
    pub heavy: bool,
    pub learner: Option<LearnerSpec>,
    pub ensemble: Option<EnsembleSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Learner(LearnerSpec),
    Ensemble(EnsembleSpec),
}

impl MethodSpec {
    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            MethodSpec::Learner(l) => MethodSpec::Learner(l.with_seed(seed)),
            MethodSpec::Ensemble(e) => MethodSpec::Ensemble(e.with_seed(seed)),
        }
    }

    pub fn kind(&self) -> String {
        match self {
            MethodSpec::Learner(l) => l.kind().to_string(),
            MethodSpec::Ensemble(e) => serde_json::to_value(e.kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            MethodSpec::Learner(l) => serde_json::to_string(l),
            MethodSpec::Ensemble(e) => serde_json::to_string(e),
        }
        .expect("specs serialise")
    }
}

impl MethodConfig {
    pub fn learner(name: &str, spec: LearnerSpec) -> Self {
        MethodConfig { name: name.into(), heavy: false, learner: Some(spec), ensemble: None }
    }

    pub fn ensemble(name: &str, spec: EnsembleSpec) -> Self {
        MethodConfig { name: name.into(), heavy: false, learner: None, ensemble: Some(spec) }
    }

    pub fn heavy(mut self) -> Self {
        self.heavy = true;
        self
    }

    pub fn spec(&self) -> Result<MethodSpec> {
        match (&self.learner, &self.ensemble) {
            (Some(l), None) => Ok(MethodSpec::Learner(l.clone())),
            (None, Some(e)) => Ok(MethodSpec::Ensemble(e.clone())),
            _ => Err(Error::Config(format!("method `{}` needs exactly one of `learner` or `ensemble`", self.name))),
        }
    }
}

/// File-system friendly method name.
pub fn slug(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect()
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }

    /// Parses a config file; relative dataset paths resolve against its
    /// directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::from_toml_str(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let DatasetConfig::Csv { schema, files } = &mut cfg.dataset {
            if schema.is_relative() {
                *schema = base.join(&*schema);
            }
            for f in files.iter_mut().filter(|f| f.is_relative()) {
                *f = base.join(&*f);
            }
        }
        Ok(cfg)
    }

    /// Applies `IDSEMBLE_OUT_DIR` / `IDSEMBLE_THREADS` when set.
    pub fn apply_env_overrides(&mut self) -> Result<()> {
        if let Ok(dir) = std::env::var(ENV_OUT_DIR) {
            if !dir.is_empty() {
                self.output_dir = Some(dir.into());
            }
        }
        if let Ok(t) = std::env::var(ENV_THREADS) {
            if !t.is_empty() {
                let n = t.parse().map_err(|_| Error::Config(format!("{ENV_THREADS}=`{t}` is not a count")))?;
                self.threads = Some(n);
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods configured".into()));
        }
        let f = self.split.test_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Config(format!("split.test_fraction {f} outside (0, 1)")));
        }
        if let Some(f) = self.subsample_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::Config(format!("subsample_fraction {f} outside (0, 1]")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        let mut names = BTreeSet::new();
        let mut slugs = BTreeSet::new();
        for m in &self.methods {
            if m.name.trim().is_empty() {
                return Err(Error::Config("method names must be non-empty".into()));
            }
            if !names.insert(m.name.as_str()) || !slugs.insert(slug(&m.name)) {
                return Err(Error::Config(format!("duplicate method name `{}`", m.name)));
            }
            match m.spec()? {
                MethodSpec::Ensemble(e) => {
                    e.validate().map_err(|err| Error::Config(format!("method `{}`: {err}", m.name)))?
                }
                MethodSpec::Learner(_) => {}
            }
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form, ignoring thread budget and
    /// output location.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.threads = None;
        c.output_dir = None;
        let json = serde_json::to_string(&c).expect("config serialises");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
