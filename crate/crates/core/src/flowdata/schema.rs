use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Column layout and label vocabulary of one dataset.
///
/// Column names are matched after trimming surrounding whitespace, so a
/// schema can name `Destination Port` for a raw header ` Destination Port`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSchema {
    #[serde(default = "default_version")]
    pub version: u32,
    pub name: String,
    pub feature_columns: Vec<String>,
    pub label_column: String,
    #[serde(default)]
    pub categorical_columns: Vec<String>,
    pub label_vocabulary: Vec<String>,
    /// Raw label value → vocabulary entry, for grouped label sets.
    #[serde(default)]
    pub label_aliases: BTreeMap<String, String>,
    /// Files concatenated in this order when the schema is loaded as a
    /// dataset. Relative paths resolve against the schema file.
    #[serde(default)]
    pub files: Vec<PathBuf>,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

impl DatasetSchema {
    pub fn new(
        name: impl Into<String>,
        feature_columns: Vec<String>,
        label_column: impl Into<String>,
        categorical_columns: Vec<String>,
        label_vocabulary: Vec<String>,
    ) -> Result<Self> {
        let schema = DatasetSchema {
            version: SCHEMA_VERSION,
            name: name.into(),
            feature_columns,
            label_column: label_column.into(),
            categorical_columns,
            label_vocabulary,
            label_aliases: BTreeMap::new(),
            files: Vec::new(),
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let schema: DatasetSchema = toml::from_str(text)?;
        schema.validate()?;
        Ok(schema)
    }

    /// Reads a schema file; relative `files` entries are resolved against
    /// the schema's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut schema = Self::from_toml_str(&text)?;
        if let Some(dir) = path.parent() {
            for f in &mut schema.files {
                if f.is_relative() {
                    *f = dir.join(&*f);
                }
            }
        }
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        if self.feature_columns.is_empty() {
            return Err(Error::Schema("schema declares no feature columns".into()));
        }
        let mut seen = HashSet::new();
        for c in &self.feature_columns {
            if !seen.insert(c.trim()) {
                return Err(Error::Schema(format!("feature column `{c}` listed twice")));
            }
        }
        if seen.contains(self.label_column.trim()) {
            return Err(Error::Schema(format!(
                "label column `{}` is also a feature column",
                self.label_column
            )));
        }
        for c in &self.categorical_columns {
            if !seen.contains(c.trim()) {
                return Err(Error::Schema(format!(
                    "categorical column `{c}` is not a feature column"
                )));
            }
        }
        if self.label_vocabulary.is_empty() {
            return Err(Error::Schema("label vocabulary is empty".into()));
        }
        let mut labels = HashSet::new();
        for l in &self.label_vocabulary {
            if !labels.insert(l.trim()) {
                return Err(Error::Schema(format!("label `{l}` listed twice in vocabulary")));
            }
        }
        for (raw, target) in &self.label_aliases {
            if !labels.contains(target.trim()) {
                return Err(Error::Schema(format!(
                    "alias `{raw}` maps to `{target}`, which is not in the vocabulary"
                )));
            }
        }
        Ok(())
    }

    pub fn is_categorical(&self, column: &str) -> bool {
        self.categorical_columns.iter().any(|c| c.trim() == column)
    }

    /// Class index for a raw label cell, honouring aliases.
    pub fn class_index(&self, raw: &str) -> Option<usize> {
        let raw = raw.trim();
        let name = self
            .label_aliases
            .iter()
            .find(|(k, _)| k.trim() == raw)
            .map(|(_, v)| v.trim())
            .unwrap_or(raw);
        self.label_vocabulary.iter().position(|l| l.trim() == name)
    }
}
