//! Rate matrix files: `N` lines of `N` comma-separated decimals, no header.
//! Blank lines and surrounding whitespace are ignored.

use mprk_core::DenseMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixParseError {
    #[error("line {line}, column {column}: cannot parse {text:?} as a number")]
    BadNumber {
        line: usize,
        column: usize,
        text: String,
    },
    #[error("non-square matrix: {rows} rows but line {line} has {columns} columns")]
    NonSquare {
        rows: usize,
        line: usize,
        columns: usize,
    },
    #[error("empty matrix file")]
    Empty,
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix, MatrixParseError> {
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (c, field) in trimmed.split(',').enumerate() {
            let f = field.trim();
            let v: f64 = f.parse().map_err(|_| MatrixParseError::BadNumber {
                line: line_no,
                column: c + 1,
                text: f.to_string(),
            })?;
            row.push(v);
        }
        rows.push((line_no, row));
    }
    if rows.is_empty() {
        return Err(MatrixParseError::Empty);
    }
    let n = rows.len();
    if let Some((line, r)) = rows.iter().find(|(_, r)| r.len() != n) {
        return Err(MatrixParseError::NonSquare {
            rows: n,
            line: *line,
            columns: r.len(),
        });
    }
    let data = rows.into_iter().flat_map(|(_, r)| r).collect();
    Ok(DenseMatrix::from_row_major(n, data).expect("checked square"))
}
