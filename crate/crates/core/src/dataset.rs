//! CSV ingestion and export of numeric tables.
//!
//! Files are UTF-8, RFC 4180 style, with `.` as the decimal separator.

use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::permutation::PermutationVector;
use crate::selection::SweepResult;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub header: bool,
    pub delimiter: u8,
    /// Column whose weight is pinned: a header name, or a 1-based index.
    pub risk_column: Option<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            header: true,
            delimiter: b',',
            risk_column: None,
        }
    }
}

/// An ingested table and the resolved index of its risk column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub data: DataMatrix,
    pub risk_index: Option<usize>,
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(options.header)
        .delimiter(options.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(File::open(path)?);

    let names: Option<Vec<String>> = if options.header {
        Some(reader.headers()?.iter().map(str::to_owned).collect())
    } else {
        None
    };
    let column_label = |c: usize| match &names {
        Some(n) if c < n.len() => format!("{} ({})", c + 1, n[c]),
        _ => (c + 1).to_string(),
    };

    let mut width = names.as_ref().map(Vec::len);
    let mut values = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record?;
        let row = rows + 1;
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Ingest {
                path: path.to_owned(),
                row,
                column: column_label(record.len().min(expected)),
                message: format!("row has {} fields, expected {expected}", record.len()),
            });
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Ingest {
                path: path.to_owned(),
                row,
                column: column_label(c),
                message: format!("cannot parse {cell:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Ingest {
                    path: path.to_owned(),
                    row,
                    column: column_label(c),
                    message: format!("value {cell:?} is not finite"),
                });
            }
            values.push(v);
        }
        rows += 1;
    }
    let cols = width.unwrap_or(0);
    let mut data = DataMatrix::from_shape_vec(rows, cols, values)?;
    if let Some(n) = names {
        data = data.with_column_names(n)?;
    }
    let risk_index = options
        .risk_column
        .as_deref()
        .map(|name| resolve_column(&data, name))
        .transpose()?;
    Ok(Dataset { data, risk_index })
}

/// Resolves a column by header name, falling back to a 1-based index.
pub fn resolve_column(data: &DataMatrix, name: &str) -> Result<usize> {
    if let Some(i) = data.column_index(name) {
        return Ok(i);
    }
    match name.parse::<usize>() {
        Ok(i) if (1..=data.cols()).contains(&i) => Ok(i - 1),
        _ => Err(Error::Input(format!("no column named {name:?}"))),
    }
}

/// Shortest text that parses back to the same `f64`, in exponent form for
/// very large or small magnitudes.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

/// Writes `data` with a header row (column names, or `x1..xD`).
pub fn write_csv(path: impl AsRef<Path>, data: &DataMatrix) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let header: Vec<String> = match data.column_names() {
        Some(n) => n.to_vec(),
        None => (1..=data.cols()).map(|d| format!("x{d}")).collect(),
    };
    writer.write_record(&header)?;
    for t in 0..data.rows() {
        writer.write_record(data.row(t).iter().map(|v| format_float(*v)))?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes a permutation as a single `sigma` column of 1-based indices.
pub fn write_permutation(path: impl AsRef<Path>, sigma: &PermutationVector) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["sigma"])?;
    for s in sigma.to_one_based() {
        writer.write_record([s.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_permutation(path: impl AsRef<Path>) -> Result<PermutationVector> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut raw = Vec::new();
    for record in reader.records() {
        let record = record?;
        let field = record.get(0).unwrap_or_default().trim();
        raw.push(
            field
                .parse::<usize>()
                .map_err(|_| Error::Input(format!("invalid permutation entry {field:?}")))?,
        );
    }
    PermutationVector::from_one_based(&raw)
}

/// Writes the L-curve: `epsilon, expected_nonsmoothness, entropy, is_elbow`,
/// with the Shannon entropy of each fitted weight vector.
pub fn write_curve(path: impl AsRef<Path>, sweep: &SweepResult) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["epsilon", "expected_nonsmoothness", "entropy", "is_elbow"])?;
    for (k, e) in sweep.entries.iter().enumerate() {
        writer.write_record([
            format_float(e.epsilon),
            format_float(e.expected_nonsmoothness),
            format_float(e.fit.breakdown.shannon_entropy()),
            (k == sweep.elbow_index).to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_numeric_table_with_header() {
        let f = write_tmp("a,b\n1,2\n3,4.5\n-1e-3,0\n");
        let ds = load_csv(f.path(), &CsvOptions::default()).unwrap();
        assert_eq!((ds.data.rows(), ds.data.cols()), (3, 2));
        assert_eq!(ds.data.as_slice(), &[1.0, 2.0, 3.0, 4.5, -1e-3, 0.0]);
        assert_eq!(ds.data.column_names().unwrap(), &["a", "b"]);
        assert_eq!(ds.risk_index, None);
    }

    #[test]
    fn resolves_risk_column() {
        let f = write_tmp("x,risk,y\n1,2,3\n4,5,6\n7,8,9\n");
        let opts = CsvOptions {
            risk_column: Some("risk".into()),
            ..CsvOptions::default()
        };
        assert_eq!(load_csv(f.path(), &opts).unwrap().risk_index, Some(1));
        let opts = CsvOptions {
            risk_column: Some("missing".into()),
            ..CsvOptions::default()
        };
        assert!(load_csv(f.path(), &opts).is_err());
    }

    #[test]
    fn headerless_with_semicolons() {
        let f = write_tmp("1;2\n3;4\n5;6\n");
        let opts = CsvOptions {
            header: false,
            delimiter: b';',
            risk_column: Some("2".into()),
        };
        let ds = load_csv(f.path(), &opts).unwrap();
        assert_eq!(ds.data.as_slice(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(ds.risk_index, Some(1));
    }

    #[test]
    fn nan_cell_is_pinpointed() {
        let f = write_tmp("a,b\n1,2\n3,NaN\n5,6\n");
        let err = load_csv(f.path(), &CsvOptions::default()).unwrap_err();
        match err {
            Error::Ingest { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "2 (b)");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn non_numeric_and_ragged_rows() {
        let f = write_tmp("a,b\n1,2\n3,x\n5,6\n");
        let err = load_csv(f.path(), &CsvOptions::default()).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        let f = write_tmp("a,b\n1,2\n3\n5,6\n");
        let err = load_csv(f.path(), &CsvOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Ingest { row: 2, .. }), "{err}");
    }

    #[test]
    fn written_tables_read_back_exactly() {
        let data = DataMatrix::from_rows(&[
            vec![0.1, 1.0 / 3.0],
            vec![-2.5e-17, 7.0],
            vec![std::f64::consts::PI, -0.0],
        ])
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_csv(f.path(), &data).unwrap();
        let back = load_csv(f.path(), &CsvOptions::default()).unwrap().data;
        assert_eq!(back.as_slice(), data.as_slice());

        let sigma = PermutationVector::new(vec![2, 0, 1]).unwrap();
        write_permutation(f.path(), &sigma).unwrap();
        assert_eq!(read_permutation(f.path()).unwrap(), sigma);
    }
}
