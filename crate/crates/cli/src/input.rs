//! Point files: one comma-separated point per line, `#` comments allowed.
//! Labeled files carry the response as an extra last column.

use std::fs::File;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};

#[derive(Debug)]
pub enum InputError {
    Open { path: PathBuf, source: std::io::Error },
    Malformed { path: PathBuf, line: u64, message: String },
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputError::Open { path, source } => write!(f, "{}: {}", path.display(), source),
            InputError::Malformed {
                path,
                line,
                message,
            } => write!(f, "{}:{}: {}", path.display(), line, message),
        }
    }
}

impl std::error::Error for InputError {}

/// Reads every row of a point file as numbers.
fn read_rows(path: &Path) -> Result<Vec<(u64, Vec<f64>)>, InputError> {
    let file = File::open(path).map_err(|source| InputError::Open {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| InputError::Malformed {
            path: path.to_path_buf(),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let values = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| InputError::Malformed {
                        path: path.to_path_buf(),
                        line,
                        message: format!("expected a finite number, got {field:?}"),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((line, values));
    }
    if rows.is_empty() {
        return Err(InputError::Malformed {
            path: path.to_path_buf(),
            line: 0,
            message: "file contains no points".into(),
        });
    }
    Ok(rows)
}

fn to_matrix(path: &Path, rows: &[(u64, Vec<f64>)], width: usize) -> Result<DMatrix<f64>, InputError> {
    for (line, row) in rows {
        if row.len() != width {
            return Err(InputError::Malformed {
                path: path.to_path_buf(),
                line: *line,
                message: format!("expected {width} columns, got {}", row.len()),
            });
        }
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        width,
        rows.iter().flat_map(|(_, r)| r.iter().copied()),
    ))
}

/// Points without labels.
pub fn read_points(path: &Path) -> Result<DMatrix<f64>, InputError> {
    let rows = read_rows(path)?;
    let width = rows[0].1.len();
    to_matrix(path, &rows, width)
}

/// Points whose last column is the label.
pub fn read_labeled_points(path: &Path) -> Result<(DMatrix<f64>, DVector<f64>), InputError> {
    let rows = read_rows(path)?;
    let width = rows[0].1.len();
    if width < 2 {
        return Err(InputError::Malformed {
            path: path.to_path_buf(),
            line: rows[0].0,
            message: "labeled rows need at least one coordinate and a label".into(),
        });
    }
    let all = to_matrix(path, &rows, width)?;
    let points = all.columns(0, width - 1).into_owned();
    let labels = all.column(width - 1).into_owned();
    Ok((points, labels))
}
