//! CSV matrices with one header row and one label column.
//!
//! The top-left cell is a free-form corner label. With
//! [`Orientation::ObservationsAsRows`] the header holds feature names and the
//! label column holds observation ids; [`Orientation::FeaturesAsRows`] swaps
//! the two.

use std::fs::File;
use std::path::{Path, PathBuf};

use featsel::DataMatrix;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    #[default]
    ObservationsAsRows,
    FeaturesAsRows,
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: row {row}, column {column} ('{label}'): cannot parse '{cell}' as a number")]
    Parse { path: PathBuf, row: usize, column: usize, label: String, cell: String },
    #[error("{path}: {message}")]
    Shape { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Invalid { path: PathBuf, source: featsel::Error },
}

/// Read a labelled numeric matrix. Row and column numbers in errors are
/// 1-based positions in the file, counting the header and label column.
pub fn read_matrix(path: &Path, orientation: Orientation) -> Result<DataMatrix, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io { path: path.into(), source })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(file);
    let csv_err = |source| IngestError::Csv { path: path.into(), source };
    let shape_err = |message: String| IngestError::Shape { path: path.into(), message };

    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(csv_err)?,
        None => return Err(shape_err("file is empty".into())),
    };
    let columns: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    if columns.is_empty() {
        return Err(shape_err("header has no data columns".into()));
    }

    let mut rows = Vec::new();
    let mut values = Vec::new();
    for record in records {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(rows.len() + 2, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != columns.len() + 1 {
            return Err(shape_err(format!("row {line} has {} cells, expected {}", record.len(), columns.len() + 1)));
        }
        rows.push(record[0].to_owned());
        for (k, cell) in record.iter().skip(1).enumerate() {
            let v: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| IngestError::Parse {
                path: path.into(),
                row: line,
                column: k + 2,
                label: columns[k].clone(),
                cell: cell.to_owned(),
            })?;
            values.push(v);
        }
    }
    if rows.is_empty() {
        return Err(shape_err("no data rows".into()));
    }

    let as_read = DMatrix::from_row_slice(rows.len(), columns.len(), &values);
    let built = match orientation {
        Orientation::ObservationsAsRows => DataMatrix::new(as_read, columns, rows),
        Orientation::FeaturesAsRows => DataMatrix::new(as_read.transpose(), rows, columns),
    };
    built.map_err(|source| IngestError::Invalid { path: path.into(), source })
}

/// Write `m` so that [`read_matrix`] with the same orientation returns it
/// unchanged. Values use the shortest round-trip decimal form.
pub fn write_matrix(path: &Path, m: &DataMatrix, orientation: Orientation) -> Result<(), IngestError> {
    let file = File::create(path).map_err(|source| IngestError::Io { path: path.into(), source })?;
    let mut w = csv::Writer::from_writer(file);
    let csv_err = |source| IngestError::Csv { path: path.into(), source };
    let (values, row_labels, col_labels) = match orientation {
        Orientation::ObservationsAsRows => (m.values().clone(), m.observation_ids(), m.feature_names()),
        Orientation::FeaturesAsRows => (m.values().transpose(), m.feature_names(), m.observation_ids()),
    };
    let mut header = vec!["id".to_owned()];
    header.extend(col_labels.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for (i, label) in row_labels.iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend(values.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|source| IngestError::Io { path: path.into(), source })
}

impl From<IngestError> for crate::error::CliError {
    fn from(e: IngestError) -> Self {
        crate::error::CliError::Data(e.to_string())
    }
}
