//! Decision-matrix CSV:
//!
//! ```text
//! alternative,Style,Reliability,Fuel,Cost   <- criterion labels
//! weight,0.1,0.4,0.3,0.2                    <- weights
//! sense,benefit,benefit,benefit,cost        <- senses
//! Civic,7,9,9,8                             <- one row per alternative
//! ```
//!
//! The first cell of the three header rows is free text.

use thiserror::Error;

use crate::topsis::{CriterionSense, DecisionMatrix, TopsisError, TopsisResult};

#[derive(Debug, Error)]
pub enum MatrixCsvError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Matrix(#[from] TopsisError),
}

fn format_err(line: usize, message: impl Into<String>) -> MatrixCsvError {
    MatrixCsvError::Format {
        line,
        message: message.into(),
    }
}

fn number(line: usize, cell: &str) -> Result<f64, MatrixCsvError> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| format_err(line, format!("`{cell}` is not a number")))
}

pub fn parse_matrix_csv(bytes: &[u8]) -> Result<DecisionMatrix, MatrixCsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(bytes);
    let records = reader.records().collect::<Result<Vec<_>, _>>()?;
    if records.len() < 4 {
        return Err(format_err(
            records.len() + 1,
            "need a label row, a weight row, a sense row and at least one alternative",
        ));
    }
    let width = records[0].len();
    if width < 2 {
        return Err(format_err(1, "no criterion columns"));
    }
    for (i, r) in records.iter().enumerate() {
        if r.len() != width {
            return Err(format_err(i + 1, format!("expected {width} cells, found {}", r.len())));
        }
    }
    let criteria = records[0].iter().skip(1).map(str::to_string).collect();
    let weights = records[1]
        .iter()
        .skip(1)
        .map(|c| number(2, c))
        .collect::<Result<Vec<_>, _>>()?;
    let senses = records[2]
        .iter()
        .skip(1)
        .map(|c| c.parse::<CriterionSense>().map_err(|e| format_err(3, e)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut alternatives = Vec::new();
    let mut scores = Vec::new();
    for (i, r) in records.iter().enumerate().skip(3) {
        alternatives.push(r[0].to_string());
        scores.push(r.iter().skip(1).map(|c| number(i + 1, c)).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(DecisionMatrix::new(alternatives, criteria, scores, weights, senses)?)
}

/// `rank,alternative,closeness`, best first.
pub fn write_topsis_csv(matrix: &DecisionMatrix, result: &TopsisResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "alternative", "closeness"]).expect("memory write");
    for (pos, &i) in result.ranking.iter().enumerate() {
        w.write_record([
            (pos + 1).to_string(),
            matrix.alternatives()[i].clone(),
            result.closeness[i].to_string(),
        ])
        .expect("memory write");
    }
    String::from_utf8(w.into_inner().expect("memory flush")).expect("utf-8")
}
