//! TOPSIS multi-criteria ranking.
//!
//! A [`DecisionMatrix`] scores `m` alternatives against `n` criteria. The
//! pipeline vector-normalizes each criterion column, applies the criterion
//! weights, locates the ideal and anti-ideal reference points, measures the
//! Euclidean distance of every alternative to both, and ranks alternatives by
//! their closeness coefficient `S' / (S* + S')`.
//!
//! Each stage is exposed on its own so callers can inspect or substitute
//! intermediate tables; [`topsis`] composes them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Row-major `m × n` table of reals.
pub type Grid = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopsisError {
    #[error("decision matrix has no alternatives")]
    NoAlternatives,
    #[error("decision matrix has no criteria")]
    NoCriteria,
    #[error("row {row} has {found} scores, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{what}: expected length {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("score at ({row}, {col}) is not finite")]
    NonFiniteScore { row: usize, col: usize },
    #[error("weight {index} must be positive and finite, got {value}")]
    BadWeight { index: usize, value: f64 },
    #[error("separation {index} must be non-negative, got {value}")]
    NegativeSeparation { index: usize, value: f64 },
}

/// Whether larger (`Benefit`) or smaller (`Cost`) values of a criterion are preferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionSense {
    Benefit,
    Cost,
}

impl fmt::Display for CriterionSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriterionSense::Benefit => f.pad("benefit"),
            CriterionSense::Cost => f.pad("cost"),
        }
    }
}

impl FromStr for CriterionSense {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "benefit" => Ok(CriterionSense::Benefit),
            "cost" => Ok(CriterionSense::Cost),
            other => Err(format!("unknown criterion sense `{other}` (expected benefit or cost)")),
        }
    }
}

/// Alternatives scored against weighted criteria.
///
/// Weights are kept exactly as supplied; every computation divides them by
/// their sum first, so `(2, 8, 6, 4)` and `(0.1, 0.4, 0.3, 0.2)` are
/// interchangeable.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMatrix {
    alternatives: Vec<String>,
    criteria: Vec<String>,
    scores: Grid,
    weights: Vec<f64>,
    senses: Vec<CriterionSense>,
}

impl DecisionMatrix {
    pub fn new(
        alternatives: Vec<String>,
        criteria: Vec<String>,
        scores: Grid,
        weights: Vec<f64>,
        senses: Vec<CriterionSense>,
    ) -> Result<Self, TopsisError> {
        let m = alternatives.len();
        let n = criteria.len();
        if m == 0 {
            return Err(TopsisError::NoAlternatives);
        }
        if n == 0 {
            return Err(TopsisError::NoCriteria);
        }
        if scores.len() != m {
            return Err(TopsisError::DimensionMismatch {
                what: "score rows",
                expected: m,
                found: scores.len(),
            });
        }
        for (row, values) in scores.iter().enumerate() {
            if values.len() != n {
                return Err(TopsisError::RaggedRow {
                    row,
                    expected: n,
                    found: values.len(),
                });
            }
            if let Some(col) = values.iter().position(|x| !x.is_finite()) {
                return Err(TopsisError::NonFiniteScore { row, col });
            }
        }
        if weights.len() != n {
            return Err(TopsisError::DimensionMismatch {
                what: "weights",
                expected: n,
                found: weights.len(),
            });
        }
        check_weights(&weights)?;
        if senses.len() != n {
            return Err(TopsisError::DimensionMismatch {
                what: "senses",
                expected: n,
                found: senses.len(),
            });
        }
        Ok(Self {
            alternatives,
            criteria,
            scores,
            weights,
            senses,
        })
    }

    /// Builds a matrix with generated labels (`a0, a1, …` / `c0, c1, …`).
    pub fn unlabeled(
        scores: Grid,
        weights: Vec<f64>,
        senses: Vec<CriterionSense>,
    ) -> Result<Self, TopsisError> {
        let alternatives = (0..scores.len()).map(|i| format!("a{i}")).collect();
        let criteria = (0..weights.len()).map(|j| format!("c{j}")).collect();
        Self::new(alternatives, criteria, scores, weights, senses)
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn criteria(&self) -> &[String] {
        &self.criteria
    }

    pub fn scores(&self) -> &Grid {
        &self.scores
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn senses(&self) -> &[CriterionSense] {
        &self.senses
    }

    pub fn rows(&self) -> usize {
        self.alternatives.len()
    }

    pub fn cols(&self) -> usize {
        self.criteria.len()
    }
}

fn check_weights(weights: &[f64]) -> Result<(), TopsisError> {
    match weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w > 0.0))
    {
        Some((index, &value)) => Err(TopsisError::BadWeight { index, value }),
        None => Ok(()),
    }
}

/// All intermediate tables of one TOPSIS evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopsisResult {
    pub normalized: Grid,
    pub weighted: Grid,
    pub ideal: Vec<f64>,
    pub anti_ideal: Vec<f64>,
    pub sep_ideal: Vec<f64>,
    pub sep_anti: Vec<f64>,
    pub closeness: Vec<f64>,
    /// Alternative indices, best first.
    pub ranking: Vec<usize>,
}

impl TopsisResult {
    pub fn best(&self) -> usize {
        self.ranking[0]
    }

    pub fn worst(&self) -> usize {
        self.ranking[self.ranking.len() - 1]
    }
}

/// Divides every column by its Euclidean norm. A zero column stays zero.
pub fn normalize(matrix: &DecisionMatrix) -> Grid {
    normalize_columns(&matrix.scores)
}

pub(crate) fn normalize_columns(scores: &[Vec<f64>]) -> Grid {
    let n = scores.first().map_or(0, Vec::len);
    let norms: Vec<f64> = (0..n)
        .map(|j| scores.iter().map(|row| row[j] * row[j]).sum::<f64>().sqrt())
        .collect();
    scores
        .iter()
        .map(|row| {
            row.iter()
                .zip(&norms)
                .map(|(&x, &norm)| if norm == 0.0 { 0.0 } else { x / norm })
                .collect()
        })
        .collect()
}

/// `v_ij = (w_j / Σw) · r_ij`.
pub fn apply_weights(normalized: &[Vec<f64>], weights: &[f64]) -> Result<Grid, TopsisError> {
    check_weights(weights)?;
    let total: f64 = weights.iter().sum();
    normalized
        .iter()
        .map(|row| {
            if row.len() != weights.len() {
                return Err(TopsisError::DimensionMismatch {
                    what: "weights",
                    expected: row.len(),
                    found: weights.len(),
                });
            }
            Ok(row
                .iter()
                .zip(weights)
                .map(|(r, w)| (w / total) * r)
                .collect())
        })
        .collect()
}

/// Returns `(A*, A')`: per column, the best and worst weighted value under
/// the column's sense.
pub fn ideal_solutions(
    weighted: &[Vec<f64>],
    senses: &[CriterionSense],
) -> Result<(Vec<f64>, Vec<f64>), TopsisError> {
    if weighted.is_empty() {
        return Err(TopsisError::NoAlternatives);
    }
    for row in weighted {
        if row.len() != senses.len() {
            return Err(TopsisError::DimensionMismatch {
                what: "senses",
                expected: row.len(),
                found: senses.len(),
            });
        }
    }
    let mut ideal = Vec::with_capacity(senses.len());
    let mut anti = Vec::with_capacity(senses.len());
    for (j, sense) in senses.iter().enumerate() {
        let column = weighted.iter().map(|row| row[j]);
        let max = column.clone().fold(f64::NEG_INFINITY, f64::max);
        let min = column.fold(f64::INFINITY, f64::min);
        match sense {
            CriterionSense::Benefit => {
                ideal.push(max);
                anti.push(min);
            }
            CriterionSense::Cost => {
                ideal.push(min);
                anti.push(max);
            }
        }
    }
    Ok((ideal, anti))
}

fn distance(row: &[f64], point: &[f64]) -> f64 {
    row.iter()
        .zip(point)
        .map(|(v, p)| (p - v) * (p - v))
        .sum::<f64>()
        .sqrt()
}

/// Returns `(S*, S')`, the Euclidean distance of each row to `A*` and `A'`.
pub fn separations(
    weighted: &[Vec<f64>],
    ideal: &[f64],
    anti_ideal: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), TopsisError> {
    if ideal.len() != anti_ideal.len() {
        return Err(TopsisError::DimensionMismatch {
            what: "anti-ideal point",
            expected: ideal.len(),
            found: anti_ideal.len(),
        });
    }
    let mut sep_ideal = Vec::with_capacity(weighted.len());
    let mut sep_anti = Vec::with_capacity(weighted.len());
    for row in weighted {
        if row.len() != ideal.len() {
            return Err(TopsisError::DimensionMismatch {
                what: "ideal point",
                expected: row.len(),
                found: ideal.len(),
            });
        }
        sep_ideal.push(distance(row, ideal));
        sep_anti.push(distance(row, anti_ideal));
    }
    Ok((sep_ideal, sep_anti))
}

/// Closeness `C*_i = S'_i / (S*_i + S'_i)` and the ranking by descending
/// closeness. A row at distance zero from both points gets `C* = 1`; equal
/// closeness keeps ascending index order.
pub fn closeness_and_rank(
    sep_ideal: &[f64],
    sep_anti: &[f64],
) -> Result<(Vec<f64>, Vec<usize>), TopsisError> {
    if sep_ideal.len() != sep_anti.len() {
        return Err(TopsisError::DimensionMismatch {
            what: "anti-ideal separations",
            expected: sep_ideal.len(),
            found: sep_anti.len(),
        });
    }
    for (index, (&s_star, &s_anti)) in sep_ideal.iter().zip(sep_anti).enumerate() {
        if let Some(value) = [s_star, s_anti].into_iter().find(|s| s.is_nan() || *s < 0.0) {
            return Err(TopsisError::NegativeSeparation { index, value });
        }
    }
    let closeness: Vec<f64> = sep_ideal
        .iter()
        .zip(sep_anti)
        .map(|(&s_star, &s_anti)| {
            let total = s_star + s_anti;
            if total == 0.0 {
                1.0
            } else {
                s_anti / total
            }
        })
        .collect();
    Ok((closeness.clone(), rank_descending(&closeness)))
}

/// Indices sorted by descending score; the sort is stable so ties stay in
/// ascending index order.
pub fn rank_descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));
    order
}

/// Runs the full pipeline.
pub fn topsis(matrix: &DecisionMatrix) -> Result<TopsisResult, TopsisError> {
    let normalized = normalize(matrix);
    let weighted = apply_weights(&normalized, &matrix.weights)?;
    let (ideal, anti_ideal) = ideal_solutions(&weighted, &matrix.senses)?;
    let (sep_ideal, sep_anti) = separations(&weighted, &ideal, &anti_ideal)?;
    let (closeness, ranking) = closeness_and_rank(&sep_ideal, &sep_anti)?;
    Ok(TopsisResult {
        normalized,
        weighted,
        ideal,
        anti_ideal,
        sep_ideal,
        sep_anti,
        closeness,
        ranking,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use CriterionSense::{Benefit, Cost};

    const TOL: f64 = 1e-9;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn normalizes_style_column() {
        let m = DecisionMatrix::unlabeled(
            vec![vec![7.0], vec![8.0], vec![9.0], vec![6.0]],
            vec![1.0],
            vec![Benefit],
        )
        .unwrap();
        let r = normalize(&m);
        let expected = [0.46, 0.53, 0.59, 0.40];
        for (row, e) in r.iter().zip(expected) {
            assert!(close(row[0], e, 0.005), "{} vs {e}", row[0]);
        }
        let norm = 230f64.sqrt();
        assert!(close(r[0][0], 7.0 / norm, TOL));
    }

    #[test]
    fn single_alternative_normalizes_to_one() {
        let m = DecisionMatrix::unlabeled(vec![vec![5.0]], vec![1.0], vec![Benefit]).unwrap();
        assert_eq!(normalize(&m), vec![vec![1.0]]);
    }

    #[test]
    fn zero_column_stays_zero() {
        let m = DecisionMatrix::unlabeled(
            vec![vec![0.0, 1.0], vec![0.0, 2.0]],
            vec![1.0, 1.0],
            vec![Benefit, Benefit],
        )
        .unwrap();
        let r = normalize(&m);
        assert_eq!(r[0][0], 0.0);
        assert_eq!(r[1][0], 0.0);
    }

    #[test]
    fn weights_are_normalized_by_sum() {
        let r = vec![vec![0.4, 0.6, 0.5, 0.5], vec![0.3, 0.2, 0.1, 0.9]];
        let a = apply_weights(&r, &[2.0, 8.0, 6.0, 4.0]).unwrap();
        let b = apply_weights(&r, &[0.1, 0.4, 0.3, 0.2]).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            for (x, y) in ra.iter().zip(rb) {
                assert!(close(*x, *y, 1e-15));
            }
        }
    }

    #[test]
    fn identity_weight() {
        let v = apply_weights(&[vec![1.0], vec![0.8]], &[1.0]).unwrap();
        assert_eq!(v, vec![vec![1.0], vec![0.8]]);
    }

    #[test]
    fn weight_dimension_mismatch_is_an_error() {
        let err = apply_weights(&[vec![1.0, 2.0]], &[1.0]).unwrap_err();
        assert!(matches!(err, TopsisError::DimensionMismatch { .. }));
        assert!(matches!(
            apply_weights(&[vec![1.0]], &[0.0]),
            Err(TopsisError::BadWeight { .. })
        ));
    }

    #[test]
    fn ideal_points_follow_sense() {
        let v = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        let (a, b) = ideal_solutions(&v, &[Benefit, Cost]).unwrap();
        assert_eq!(a, vec![2.0, 1.0]);
        assert_eq!(b, vec![1.0, 2.0]);
    }

    #[test]
    fn single_row_is_both_reference_points() {
        let v = vec![vec![0.3, 0.7, 0.1]];
        let (a, b) = ideal_solutions(&v, &[Benefit, Cost, Benefit]).unwrap();
        assert_eq!(a, v[0]);
        assert_eq!(b, v[0]);
    }

    #[test]
    fn row_at_ideal_has_zero_separation() {
        let v = vec![vec![0.5, 0.2], vec![0.1, 0.1]];
        let (a, b) = ideal_solutions(&v, &[Benefit, Benefit]).unwrap();
        let (s_star, s_anti) = separations(&v, &a, &b).unwrap();
        assert_eq!(s_star[0], 0.0);
        assert_eq!(s_anti[1], 0.0);
    }

    #[test]
    fn degenerate_closeness_is_one() {
        let (c, rank) = closeness_and_rank(&[0.0], &[0.0]).unwrap();
        assert_eq!(c, vec![1.0]);
        assert_eq!(rank, vec![0]);
    }

    #[test]
    fn negative_separation_rejected() {
        assert!(closeness_and_rank(&[-1.0], &[0.5]).is_err());
    }

    #[test]
    fn singleton_matrix_ranks_itself_ideal() {
        let m = DecisionMatrix::unlabeled(vec![vec![3.0, 4.0]], vec![1.0, 1.0], vec![Benefit, Cost])
            .unwrap();
        let res = topsis(&m).unwrap();
        assert_eq!(res.ranking, vec![0]);
        assert_eq!(res.closeness, vec![1.0]);
    }

    #[test]
    fn identical_rows_tie_by_index() {
        let m = DecisionMatrix::unlabeled(
            vec![vec![3.0, 4.0], vec![3.0, 4.0]],
            vec![0.5, 0.5],
            vec![Benefit, Cost],
        )
        .unwrap();
        let res = topsis(&m).unwrap();
        assert_eq!(res.closeness[0], res.closeness[1]);
        assert_eq!(res.ranking, vec![0, 1]);
    }

    #[test]
    fn rejects_malformed_matrices() {
        assert_eq!(
            DecisionMatrix::unlabeled(vec![], vec![1.0], vec![Benefit]),
            Err(TopsisError::NoAlternatives)
        );
        assert!(matches!(
            DecisionMatrix::unlabeled(vec![vec![1.0, 2.0], vec![1.0]], vec![1.0, 1.0], vec![Benefit, Benefit]),
            Err(TopsisError::RaggedRow { row: 1, .. })
        ));
        assert!(matches!(
            DecisionMatrix::unlabeled(vec![vec![f64::NAN]], vec![1.0], vec![Benefit]),
            Err(TopsisError::NonFiniteScore { .. })
        ));
        assert!(matches!(
            DecisionMatrix::unlabeled(vec![vec![1.0]], vec![-1.0], vec![Benefit]),
            Err(TopsisError::BadWeight { .. })
        ));
    }

    #[test]
    fn sense_parses_case_insensitively() {
        assert_eq!("Benefit".parse::<CriterionSense>(), Ok(Benefit));
        assert_eq!(" cost ".parse::<CriterionSense>(), Ok(Cost));
        assert!("gain".parse::<CriterionSense>().is_err());
    }
}
