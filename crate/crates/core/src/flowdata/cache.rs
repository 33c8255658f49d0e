use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use super::preprocess::PreprocessReport;
use crate::{Error, Result};

pub const CACHE_VERSION: u32 = 1;

/// JSON sidecar written next to a cached feature matrix CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheSidecar {
    pub version: u32,
    pub n_samples: usize,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub report: Option<PreprocessReport>,
}

fn sidecar_path(csv_path: &Path) -> PathBuf {
    let mut p = csv_path.as_os_str().to_owned();
    p.push(".json");
    PathBuf::from(p)
}

/// Writes `path` (CSV: features, then `row_id` and `label` as class index)
/// and `path.json` (names and the preprocessing report).
pub fn save_cached(m: &FeatureMatrix, report: Option<&PreprocessReport>, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = m.feature_names().to_vec();
    header.push("row_id".into());
    header.push("label".into());
    w.write_record(&header)?;
    for (i, row) in m.x().outer_iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        rec.push(m.row_ids()[i].to_string());
        rec.push(m.y()[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    let sidecar = CacheSidecar {
        version: CACHE_VERSION,
        n_samples: m.n_samples(),
        feature_names: m.feature_names().to_vec(),
        class_names: m.class_names().to_vec(),
        report: report.cloned(),
    };
    std::fs::write(sidecar_path(path), serde_json::to_vec_pretty(&sidecar)?)?;
    Ok(())
}

pub fn load_cached(path: &Path) -> Result<(FeatureMatrix, CacheSidecar)> {
    let sidecar: CacheSidecar = serde_json::from_slice(&std::fs::read(sidecar_path(path))?)?;
    if sidecar.version != CACHE_VERSION {
        return Err(Error::Format(format!("cache version {} unsupported", sidecar.version)));
    }
    let d = sidecar.feature_names.len();
    let mut r = csv::Reader::from_path(path)?;
    let mut values = Vec::with_capacity(sidecar.n_samples * d);
    let mut ids = Vec::with_capacity(sidecar.n_samples);
    let mut y = Vec::with_capacity(sidecar.n_samples);
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != d + 2 {
            return Err(Error::Parse { row: i, message: format!("expected {} cells", d + 2) });
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse { row: i, message: e.to_string() })
        };
        for cell in rec.iter().take(d) {
            values.push(num(cell)?);
        }
        let int = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse { row: i, message: e.to_string() })
        };
        ids.push(int(&rec[d])?);
        y.push(int(&rec[d + 1])?);
    }
    let x = Array2::from_shape_vec((y.len(), d), values)
        .map_err(|e| Error::Dimension(e.to_string()))?;
    let m = FeatureMatrix::with_row_ids(x, y, sidecar.feature_names.clone(), sidecar.class_names.clone(), ids)?;
    Ok((m, sidecar))
}
