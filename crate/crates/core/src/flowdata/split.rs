use rand::seq::SliceRandom;

use super::matrix::FeatureMatrix;
use crate::{seed, Error, Result};

/// Row positions of a train/test partition, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn rows_by_class(y: &[usize], n_classes: usize) -> Vec<Vec<usize>> {
    let mut by = vec![Vec::new(); n_classes];
    for (i, &c) in y.iter().enumerate() {
        by[c].push(i);
    }
    by
}

fn check_fraction(f: f64, allow_one: bool) -> Result<()> {
    let ok = f > 0.0 && (f < 1.0 || (allow_one && f == 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("fraction {f} out of range")))
    }
}

/// Per class: shuffle, then send `round(count * test_fraction)` rows
/// (clamped to `[1, count - 1]`) to the test side.
pub fn stratified_split_indices(
    y: &[usize],
    class_names: &[String],
    test_fraction: f64,
    seed: u64,
) -> Result<SplitIndices> {
    check_fraction(test_fraction, false)?;
    let mut rng = seed::rng(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (c, mut rows) in rows_by_class(y, class_names.len()).into_iter().enumerate() {
        match rows.len() {
            0 => continue,
            1 => {
                return Err(Error::Split(format!(
                    "class `{}` has a single sample and cannot be split",
                    class_names[c]
                )))
            }
            n => {
                rows.shuffle(&mut rng);
                let k = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
                test.extend_from_slice(&rows[..k]);
                train.extend_from_slice(&rows[k..]);
            }
        }
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { train, test })
}

pub fn stratified_split(m: &FeatureMatrix, test_fraction: f64, seed: u64) -> Result<(FeatureMatrix, FeatureMatrix)> {
    let idx = stratified_split_indices(m.y(), m.class_names(), test_fraction, seed)?;
    Ok((m.select_rows(&idx.train)?, m.select_rows(&idx.test)?))
}

/// Keeps `round(count * fraction)` rows of every class, in original order.
pub fn stratified_subsample_indices(
    y: &[usize],
    class_names: &[String],
    fraction: f64,
    seed: u64,
) -> Result<Vec<usize>> {
    check_fraction(fraction, true)?;
    let mut rng = seed::rng(seed);
    let mut keep = Vec::new();
    for (c, mut rows) in rows_by_class(y, class_names.len()).into_iter().enumerate() {
        if rows.is_empty() {
            continue;
        }
        let target = rows.len() as f64 * fraction;
        if target < 1.0 {
            return Err(Error::Split(format!(
                "fraction {fraction} leaves class `{}` ({} rows) empty",
                class_names[c],
                rows.len()
            )));
        }
        rows.shuffle(&mut rng);
        let k = (target.round() as usize).min(rows.len());
        keep.extend_from_slice(&rows[..k]);
    }
    keep.sort_unstable();
    Ok(keep)
}

pub fn stratified_subsample(m: &FeatureMatrix, fraction: f64, seed: u64) -> Result<FeatureMatrix> {
    let keep = stratified_subsample_indices(m.y(), m.class_names(), fraction, seed)?;
    m.select_rows(&keep)
}

/// Stratified fold assignment: `result[i]` is the fold of row `i`.
/// Rows of each class are shuffled and dealt round-robin, continuing the
/// rotation across classes so fold sizes differ by at most one.
pub fn stratified_kfold(y: &[usize], n_classes: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 || k > y.len() {
        return Err(Error::Config(format!("cannot make {k} folds from {} rows", y.len())));
    }
    let mut rng = seed::rng(seed);
    let mut fold = vec![0; y.len()];
    let mut next = 0usize;
    for mut rows in rows_by_class(y, n_classes) {
        rows.shuffle(&mut rng);
        for r in rows {
            fold[r] = next % k;
            next += 1;
        }
    }
    Ok(fold)
}
