//! Experiment runner: config → dataset → split → methods → report bundle.

mod config;
mod emit;
mod runner;

pub use config::{
    slug, DatasetConfig, ExperimentConfig, MethodConfig, MethodSpec, SplitConfig, CONFIG_VERSION, ENV_OUT_DIR,
    ENV_THREADS,
};
pub use emit::{emit_reports, read_bundle, sha256_hex, Manifest, ManifestEntry};
pub use runner::{load_dataset, run_experiment, DatasetSummary, MethodResult, ReportBundle};

use std::path::{Path, PathBuf};

use crate::Result;

/// Default output directory when neither config, environment nor caller
/// chooses one.
pub const DEFAULT_OUT_DIR: &str = "reports";

/// Runs the experiment and writes its bundle; returns the directory used.
pub fn run_and_emit(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<(ReportBundle, PathBuf)> {
    let bundle = run_experiment(cfg)?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR).join(slug(&cfg.name)));
    emit_reports(&bundle, &dir)?;
    Ok((bundle, dir))
}
