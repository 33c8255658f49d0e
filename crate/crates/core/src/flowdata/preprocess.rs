use std::collections::{BTreeMap, HashMap, HashSet};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use super::schema::DatasetSchema;
use super::table::RawTable;
use crate::{Error, Result};

/// What each cleaning step did.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PreprocessReport {
    pub rows_in: usize,
    pub duplicates_removed: usize,
    pub constant_columns_dropped: Vec<String>,
    /// Only columns that had at least one missing cell.
    pub imputed_cells: BTreeMap<String, usize>,
    pub encoded_columns: Vec<String>,
    /// First-appearance category order per encoded column; code = position.
    pub category_orders: BTreeMap<String, Vec<String>>,
    pub class_histogram: BTreeMap<String, usize>,
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// One distinct value, missing cells ignored. Numeric cells compare by
/// parsed value, categorical cells by trimmed text.
fn is_single_valued(rows: &[&Vec<String>], ci: usize, categorical: bool) -> bool {
    if categorical {
        let first = rows[0][ci].trim();
        return rows.iter().all(|r| r[ci].trim() == first);
    }
    let mut values = rows.iter().filter_map(|r| parse_cell(&r[ci]));
    match values.next() {
        Some(first) => values.all(|v| v == first),
        None => false,
    }
}

/// Cleans a raw table into a feature matrix.
///
/// Steps, in order: trim header names; drop exact duplicate rows (first
/// kept); drop feature columns with one distinct value; parse numbers,
/// treating empty, non-numeric and infinite cells as missing; replace
/// missing cells by the column mean; ordinal-encode categorical columns in
/// first-appearance order; encode labels by vocabulary position.
pub fn preprocess(raw: &RawTable, schema: &DatasetSchema) -> Result<(FeatureMatrix, PreprocessReport)> {
    schema.validate()?;
    let mut report = PreprocessReport { rows_in: raw.rows.len(), ..Default::default() };

    // 1. trimmed header lookup
    let header: Vec<&str> = raw.header.iter().map(|h| h.trim()).collect();
    let find = |name: &str| -> Result<usize> {
        let name = name.trim();
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::Schema(format!("column `{name}` missing from {}", raw.source_path)))
    };
    let feature_idx: Vec<usize> = schema.feature_columns.iter().map(|c| find(c)).collect::<Result<_>>()?;
    let label_idx = find(&schema.label_column)?;

    // 2. exact duplicates
    let mut seen: HashSet<&[String]> = HashSet::with_capacity(raw.rows.len());
    let rows: Vec<&Vec<String>> = raw.rows.iter().filter(|r| seen.insert(r.as_slice())).collect();
    report.duplicates_removed = raw.rows.len() - rows.len();
    if rows.is_empty() {
        return Err(Error::Precondition(format!("{} has no data rows", raw.source_path)));
    }

    // 3. single-valued columns
    let mut kept: Vec<(String, usize)> = Vec::new();
    for (name, &ci) in schema.feature_columns.iter().zip(&feature_idx) {
        if is_single_valued(&rows, ci, schema.is_categorical(name.trim())) {
            report.constant_columns_dropped.push(name.trim().to_string());
        } else {
            kept.push((name.trim().to_string(), ci));
        }
    }
    if kept.is_empty() {
        // nothing would be left to learn from; keep the columns as they are
        report.constant_columns_dropped.clear();
        kept = schema
            .feature_columns
            .iter()
            .zip(&feature_idx)
            .map(|(name, &ci)| (name.trim().to_string(), ci))
            .collect();
    }

    let n = rows.len();
    let d = kept.len();
    let mut x = Array2::<f64>::zeros((n, d));
    for (j, (name, ci)) in kept.iter().enumerate() {
        if schema.is_categorical(name) {
            // 6. ordinal encoding, first-appearance order
            let mut codes: HashMap<&str, usize> = HashMap::new();
            let mut order: Vec<String> = Vec::new();
            for (i, r) in rows.iter().enumerate() {
                let cell = r[*ci].trim();
                let next = codes.len();
                let code = *codes.entry(cell).or_insert_with(|| {
                    order.push(cell.to_string());
                    next
                });
                x[[i, j]] = code as f64;
            }
            report.encoded_columns.push(name.clone());
            report.category_orders.insert(name.clone(), order);
            continue;
        }
        // 4. parse
        let parsed: Vec<Option<f64>> = rows.iter().map(|r| parse_cell(&r[*ci])).collect();
        let (sum, count) = parsed
            .iter()
            .flatten()
            .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        if count == 0 {
            return Err(Error::Preprocess {
                column: name.clone(),
                message: "no parseable numeric values".into(),
            });
        }
        // 5. mean imputation
        let mean = sum / count as f64;
        let missing = n - count;
        if missing > 0 {
            report.imputed_cells.insert(name.clone(), missing);
        }
        for (i, v) in parsed.into_iter().enumerate() {
            x[[i, j]] = v.unwrap_or(mean);
        }
    }

    // 7. labels
    let mut y = Vec::with_capacity(n);
    for (i, r) in rows.iter().enumerate() {
        let cell = &r[label_idx];
        let c = schema
            .class_index(cell)
            .ok_or_else(|| Error::UnknownLabel { label: cell.trim().to_string(), row: i })?;
        y.push(c);
    }
    let class_names: Vec<String> = schema.label_vocabulary.iter().map(|s| s.trim().to_string()).collect();
    let mut hist = vec![0usize; class_names.len()];
    for &c in &y {
        hist[c] += 1;
    }
    report.class_histogram = class_names.iter().cloned().zip(hist).collect();

    let names = kept.into_iter().map(|(n, _)| n).collect();
    let m = FeatureMatrix::new(x, y, names, class_names)?;
    Ok((m, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn table(header: &[&str], rows: &[&[&str]]) -> RawTable {
        RawTable::new(s(header), rows.iter().map(|r| s(r)).collect(), "fixture").unwrap()
    }

    fn schema(features: &[&str], categorical: &[&str]) -> DatasetSchema {
        DatasetSchema::new("t", s(features), "Label", s(categorical), s(&["A", "B"])).unwrap()
    }

    #[test]
    fn duplicates_removed_first_kept() {
        let t = table(&["f", "g", "Label"], &[&["1", "2", "A"], &["1", "2", "A"], &["3", "4", "B"]]);
        let (m, r) = preprocess(&t, &schema(&["f", "g"], &[])).unwrap();
        assert_eq!(m.n_samples(), 2);
        assert_eq!(r.duplicates_removed, 1);
    }

    #[test]
    fn two_identical_rows_collapse_to_one() {
        let t = table(&["f", "Label"], &[&["1", "A"], &["1", "A"]]);
        let (m, r) = preprocess(&t, &schema(&["f"], &[])).unwrap();
        assert_eq!((m.n_samples(), r.duplicates_removed), (1, 1));
        assert!(r.constant_columns_dropped.is_empty());
        assert_eq!(m.n_features(), 1);
    }

    #[test]
    fn mean_imputation() {
        let t = table(&["f", "Label"], &[&["1.0", "A"], &["", "B"], &["3.0", "A"]]);
        let (m, r) = preprocess(&t, &schema(&["f"], &[])).unwrap();
        assert_eq!(m.x()[[1, 0]], 2.0);
        assert_eq!(r.imputed_cells.get("f"), Some(&1));
    }

    #[test]
    fn infinity_and_garbage_are_missing() {
        let t = table(&["f", "Label"], &[&["Infinity", "A"], &["NaN", "B"], &["4", "A"], &["x", "B"], &["2", "B"]]);
        let (m, r) = preprocess(&t, &schema(&["f"], &[])).unwrap();
        assert_eq!(r.imputed_cells["f"], 3);
        assert_eq!(m.x()[[0, 0]], 3.0);
    }

    #[test]
    fn all_missing_column_is_an_error() {
        let t = table(&["f", "g", "Label"], &[&["", "1", "A"], &["inf", "2", "B"]]);
        match preprocess(&t, &schema(&["f", "g"], &[])) {
            Err(Error::Preprocess { column, .. }) => assert_eq!(column, "f"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_label_is_an_error() {
        let t = table(&["f", "Label"], &[&["1", "A"], &["2", "C"]]);
        assert!(matches!(
            preprocess(&t, &schema(&["f"], &[])),
            Err(Error::UnknownLabel { row: 1, .. })
        ));
    }

    #[test]
    fn header_whitespace_is_stripped() {
        let t = table(&[" f", " Label"], &[&["1", "A"], &["2", "B"]]);
        let (m, _) = preprocess(&t, &schema(&["f"], &[])).unwrap();
        assert_eq!(m.feature_names(), &["f"]);
    }
}
