//! Reference implementations shared by the integration tests.
#![allow(dead_code)]

use specnego::topsis::CriterionSense;

/// Closeness coefficients computed in one pass straight from the textbook
/// definition, with no code shared with the library.
pub fn closeness_oracle(scores: &[Vec<f64>], weights: &[f64], senses: &[CriterionSense]) -> Vec<f64> {
    let m = scores.len();
    let n = weights.len();
    let wsum: f64 = weights.iter().sum();
    let mut v = vec![vec![0.0; n]; m];
    for j in 0..n {
        let norm = scores.iter().map(|row| row[j].powi(2)).sum::<f64>().sqrt();
        for i in 0..m {
            let r = if norm > 0.0 { scores[i][j] / norm } else { 0.0 };
            v[i][j] = r * weights[j] / wsum;
        }
    }
    let mut best = vec![0.0; n];
    let mut worst = vec![0.0; n];
    for j in 0..n {
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for row in &v {
            hi = hi.max(row[j]);
            lo = lo.min(row[j]);
        }
        match senses[j] {
            CriterionSense::Benefit => {
                best[j] = hi;
                worst[j] = lo;
            }
            CriterionSense::Cost => {
                best[j] = lo;
                worst[j] = hi;
            }
        }
    }
    v.iter()
        .map(|row| {
            let mut d_best = 0.0;
            let mut d_worst = 0.0;
            for j in 0..n {
                d_best += (row[j] - best[j]).powi(2);
                d_worst += (row[j] - worst[j]).powi(2);
            }
            let (sb, sw) = (d_best.sqrt(), d_worst.sqrt());
            if sb + sw == 0.0 {
                1.0
            } else {
                sw / (sb + sw)
            }
        })
        .collect()
}

/// Indices sorted by descending closeness; equal scores keep index order.
pub fn ranking_oracle(closeness: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..closeness.len()).collect();
    // insertion sort, so stability is obvious
    for k in 1..idx.len() {
        let mut p = k;
        while p > 0 && closeness[idx[p - 1]] < closeness[idx[p]] {
            idx.swap(p - 1, p);
            p -= 1;
        }
    }
    idx
}

pub const CARS: [&str; 4] = ["Civic", "Saturn", "Ford", "Mazda"];
pub const CAR_SCORES: [[f64; 4]; 4] = [
    [7.0, 9.0, 9.0, 8.0],
    [8.0, 7.0, 8.0, 7.0],
    [9.0, 6.0, 8.0, 9.0],
    [6.0, 7.0, 8.0, 6.0],
];
pub const CAR_WEIGHTS: [f64; 4] = [0.1, 0.4, 0.3, 0.2];

pub fn car_rows() -> Vec<Vec<f64>> {
    CAR_SCORES.iter().map(|r| r.to_vec()).collect()
}
