use std::collections::HashMap;
use std::path::Path;

use super::schema::DatasetSchema;
use crate::{Error, Result};

/// CSV contents exactly as read: header and string cells, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub source_path: String,
}

impl RawTable {
    /// Builds a table from in-memory cells, checking that every row has
    /// exactly one cell per header column.
    pub fn new(header: Vec<String>, rows: Vec<Vec<String>>, source_path: impl Into<String>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != header.len() {
                return Err(Error::Parse {
                    row: i,
                    message: format!("expected {} cells, found {}", header.len(), r.len()),
                });
            }
        }
        Ok(RawTable { header: mangle_duplicates(header), rows, source_path: source_path.into() })
    }

    /// Index of a column, matched on the whitespace-trimmed header name.
    pub fn column_index(&self, name: &str) -> Option<usize> {
        let name = name.trim();
        self.header.iter().position(|h| h.trim() == name)
    }

    pub fn cell(&self, row: usize, column: &str) -> Option<&str> {
        let c = self.column_index(column)?;
        self.rows.get(row).map(|r| r[c].as_str())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    fn check_schema(&self, schema: &DatasetSchema) -> Result<()> {
        for col in schema.feature_columns.iter().chain(std::iter::once(&schema.label_column)) {
            if self.column_index(col).is_none() {
                return Err(Error::Schema(format!(
                    "column `{}` missing from {}",
                    col.trim(),
                    self.source_path
                )));
            }
        }
        Ok(())
    }
}

/// Repeated header names (after trimming) get `.1`, `.2`, ... suffixes so
/// every column stays addressable. CICIDS-2017 ships `Fwd Header Length`
/// twice.
fn mangle_duplicates(header: Vec<String>) -> Vec<String> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    header
        .into_iter()
        .map(|h| {
            let key = h.trim().to_string();
            let n = seen.entry(key).or_insert(0);
            let out = if *n == 0 { h } else { format!("{h}.{n}") };
            *n += 1;
            out
        })
        .collect()
}

/// Reads a comma-separated file with one header line. Cells are UTF-8;
/// invalid byte sequences (the CICIDS-2017 `Web Attack` labels carry a raw
/// cp1252 dash) are replaced with U+FFFD rather than rejected.
pub fn load_table(path: &Path, schema: &DatasetSchema) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)?;
    let lossy = |r: &csv::ByteRecord| -> Vec<String> {
        r.iter().map(|c| String::from_utf8_lossy(c).into_owned()).collect()
    };
    let header = lossy(reader.byte_headers()?);
    let width = header.len();
    let mut rows = Vec::new();
    for (i, record) in reader.byte_records().enumerate() {
        let record = record?;
        if record.len() != width {
            return Err(Error::Parse {
                row: i,
                message: format!("expected {width} cells, found {}", record.len()),
            });
        }
        rows.push(lossy(&record));
    }
    let table = RawTable {
        header: mangle_duplicates(header),
        rows,
        source_path: path.display().to_string(),
    };
    table.check_schema(schema)?;
    Ok(table)
}

/// Concatenates several files in the given order. Headers must agree after
/// trimming.
pub fn load_tables(paths: &[impl AsRef<Path>], schema: &DatasetSchema) -> Result<RawTable> {
    let mut iter = paths.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::Config("no input files listed".into()))?;
    let mut table = load_table(first.as_ref(), schema)?;
    for p in iter {
        let next = load_table(p.as_ref(), schema)?;
        let same = next.header.len() == table.header.len()
            && next.header.iter().zip(&table.header).all(|(a, b)| a.trim() == b.trim());
        if !same {
            return Err(Error::Schema(format!(
                "header of {} differs from {}",
                next.source_path, table.source_path
            )));
        }
        table.rows.extend(next.rows);
        table.source_path = format!("{};{}", table.source_path, next.source_path);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn schema() -> DatasetSchema {
        DatasetSchema::new(
            "fixture",
            vec!["Destination Port".into(), "Flow Duration".into()],
            "Label",
            vec![],
            vec!["BENIGN".into(), "DoS".into()],
        )
        .unwrap()
    }

    fn write(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn header_only_gives_zero_rows() {
        let f = write(" Destination Port, Flow Duration, Label\n");
        let t = load_table(f.path(), &schema()).unwrap();
        assert_eq!(t.n_rows(), 0);
    }

    #[test]
    fn cells_are_verbatim() {
        let f = write(" Destination Port, Flow Duration, Label\n80,10,BENIGN\n443, 7 ,DoS\n8080,3,BENIGN\n");
        let t = load_table(f.path(), &schema()).unwrap();
        assert_eq!(t.cell(2, "Destination Port"), Some("8080"));
        assert_eq!(t.cell(1, "Flow Duration"), Some(" 7 "));
        assert_eq!(t.header[0], " Destination Port");
    }

    #[test]
    fn missing_column_is_named() {
        let f = write("Destination Port,Label\n80,BENIGN\n");
        match load_table(f.path(), &schema()) {
            Err(Error::Schema(msg)) => assert!(msg.contains("Flow Duration"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_row_reports_index() {
        let f = write("Destination Port,Flow Duration,Label\n80,1,BENIGN\n81,2\n");
        match load_table(f.path(), &schema()) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_headers_are_suffixed() {
        let f = write("Destination Port,Flow Duration, Flow Duration,Label\n1,2,3,BENIGN\n");
        let t = load_table(f.path(), &schema()).unwrap();
        assert_eq!(t.cell(0, "Flow Duration.1"), Some("3"));
    }

    #[test]
    fn concatenation_keeps_file_order() {
        let a = write("Destination Port,Flow Duration,Label\n1,2,BENIGN\n");
        let b = write("Destination Port,Flow Duration,Label\n3,4,DoS\n");
        let t = load_tables(&[a.path(), b.path()], &schema()).unwrap();
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.cell(1, "Destination Port"), Some("3"));
    }
}
