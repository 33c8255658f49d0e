use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::slug;
use super::runner::ReportBundle;
use crate::metrics::{ranking_csv, render_ranking_text, render_runtime_text, RuntimeRecord};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the bundle directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub config_hash: String,
    pub files: Vec<ManifestEntry>,
}

/// Per-method `metrics.json`: everything except timings.
#[derive(Serialize)]
struct MethodMetrics<'a> {
    name: &'a str,
    kind: &'a str,
    seed: u64,
    heavy: bool,
    train_rows: usize,
    report: &'a crate::metrics::MetricReport,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct Writer {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl Writer {
    fn put(&mut self, rel: &str, contents: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, contents)?;
        self.entries.push(ManifestEntry { path: rel.into(), sha256: sha256_hex(contents), bytes: contents.len() as u64 });
        Ok(())
    }
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn write_all(bundle: &ReportBundle, w: &mut Writer) -> Result<()> {
    w.put("ranking.csv", ranking_csv(&bundle.ranking, bundle.runtime_table)?.as_bytes())?;
    w.put("ranking.txt", render_ranking_text(&bundle.ranking).as_bytes())?;
    if bundle.runtime_table {
        let runtimes: Vec<RuntimeRecord> = bundle.methods.iter().filter_map(|m| m.runtime.clone()).collect();
        w.put("runtimes.txt", render_runtime_text(&runtimes).as_bytes())?;
    }
    for m in &bundle.methods {
        let dir = format!("methods/{}", slug(&m.name));
        match (&m.report, &m.error) {
            (Some(report), _) => {
                let metrics = MethodMetrics {
                    name: &m.name,
                    kind: &m.kind,
                    seed: m.seed,
                    heavy: m.heavy,
                    train_rows: m.train_rows,
                    report,
                };
                w.put(&format!("{dir}/metrics.json"), &json(&metrics)?)?;
                w.put(&format!("{dir}/confusion.csv"), report.confusion.to_csv()?.as_bytes())?;
                if let Some(rt) = &m.runtime {
                    w.put(&format!("{dir}/runtime.json"), &json(rt)?)?;
                }
            }
            (None, err) => {
                let msg = err.clone().unwrap_or_else(|| "unknown failure".into());
                w.put(&format!("{dir}/error.txt"), format!("{msg}\n").as_bytes())?;
            }
        }
    }
    w.put("bundle.json", &json(bundle)?)?;
    let manifest = Manifest {
        experiment: bundle.experiment.clone(),
        config_hash: bundle.config_hash.clone(),
        files: w.entries.clone(),
    };
    let bytes = json(&manifest)?;
    std::fs::write(w.root.join("manifest.json"), bytes)?;
    Ok(())
}

/// Writes the bundle into `out` via a sibling temporary directory that is
/// renamed into place once complete. An existing `out` is replaced only if
/// it is empty or holds a previous bundle (has a `manifest.json`).
pub fn emit_reports(bundle: &ReportBundle, out: &Path) -> Result<Manifest> {
    if bundle.methods.is_empty() {
        return Err(Error::Precondition("refusing to emit an empty bundle".into()));
    }
    if out.exists() {
        let is_empty = std::fs::read_dir(out)?.next().is_none();
        if !is_empty && !out.join("manifest.json").exists() {
            return Err(Error::Precondition(format!(
                "output directory {} exists and does not hold a report bundle",
                out.display()
            )));
        }
    }
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent)?;
    let leaf = out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "bundle".into());
    let tmp = parent.join(format!(".{leaf}.tmp-{}", std::process::id()));
    if tmp.exists() {
        std::fs::remove_dir_all(&tmp)?;
    }
    std::fs::create_dir(&tmp)?;

    let mut w = Writer { root: tmp.clone(), entries: Vec::new() };
    if let Err(e) = write_all(bundle, &mut w) {
        let _ = std::fs::remove_dir_all(&tmp);
        return Err(e);
    }
    if out.exists() {
        std::fs::remove_dir_all(out)?;
    }
    std::fs::rename(&tmp, out)?;
    Ok(Manifest { experiment: bundle.experiment.clone(), config_hash: bundle.config_hash.clone(), files: w.entries })
}

/// Reads `bundle.json` back from an emitted directory.
pub fn read_bundle(dir: &Path) -> Result<ReportBundle> {
    Ok(serde_json::from_str(&std::fs::read_to_string(dir.join("bundle.json"))?)?)
}
