//! CSV loading for design matrices, response vectors and Gram matrices.
//! All values parse as 64-bit floats; parse failures name the row and
//! column.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

fn read_numeric_csv(path: &str, has_header: bool) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Io {
            path: path.to_string(),
            msg: e.to_string(),
        })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let header_offset = if has_header { 1 } else { 0 };
    for (idx, record) in reader.records().enumerate() {
        let row_no = idx + 1 + header_offset;
        let record = record.map_err(|e| Error::Io {
            path: path.to_string(),
            msg: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let mut row = Vec::with_capacity(record.len());
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::CsvParse {
                path: path.to_string(),
                row: row_no,
                col: col + 1,
                msg: format!("'{field}' is not a number"),
            })?;
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::CsvParse {
                    path: path.to_string(),
                    row: row_no,
                    col: row.len(),
                    msg: format!("row has {} fields, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Io {
            path: path.to_string(),
            msg: "file contains no data rows".to_string(),
        });
    }
    Ok(rows)
}

/// Loads an n×m design matrix (one sample per row).
pub fn load_design_csv(path: &str, has_header: bool) -> Result<DMatrix<f64>> {
    let rows = read_numeric_csv(path, has_header)?;
    let n = rows.len();
    let m = rows[0].len();
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

/// Loads a response vector: a single-column CSV.
pub fn load_response_csv(path: &str, has_header: bool) -> Result<DVector<f64>> {
    let rows = read_numeric_csv(path, has_header)?;
    if rows[0].len() != 1 {
        return Err(Error::CsvParse {
            path: path.to_string(),
            row: 1 + has_header as usize,
            col: rows[0].len(),
            msg: "response file must have exactly one column".to_string(),
        });
    }
    Ok(DVector::from_fn(rows.len(), |i, _| rows[i][0]))
}

/// Loads a square Gram matrix.
pub fn load_gram_csv(path: &str, has_header: bool) -> Result<DMatrix<f64>> {
    let rows = read_numeric_csv(path, has_header)?;
    let n = rows.len();
    if rows[0].len() != n {
        return Err(Error::CsvParse {
            path: path.to_string(),
            row: 1 + has_header as usize,
            col: rows[0].len(),
            msg: format!("gram matrix must be square, got {n}x{}", rows[0].len()),
        });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}
