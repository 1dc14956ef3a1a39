//! K-nearest-neighbor classification with euclidean, cosine, and
//! Minkowski (p = 3) metrics, uniform or squared-inverse-distance voting.
//! Distance ties break by training-set order; an exact match under
//! squared-inverse weighting wins outright.

use serde::{Deserialize, Serialize};

use crate::classifiers::check_dim;
use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Euclidean,
    Cosine,
    Minkowski3,
}

impl Metric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Minkowski3 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs().powi(3))
                .sum::<f64>()
                .cbrt(),
            Metric::Cosine => {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                if na == 0.0 && nb == 0.0 {
                    0.0
                } else if na == 0.0 || nb == 0.0 {
                    1.0
                } else {
                    1.0 - dot / (na * nb)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weighting {
    Uniform,
    SquaredInverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub xs: Vec<Vec<f64>>,
    pub ys: Vec<u8>,
    pub k: usize,
    pub metric: Metric,
    pub weighting: Weighting,
}

/// Build a KNN model, clamping `k` down to the training size with a warning.
pub fn fit_knn_rows(
    rows: &[Vec<f64>],
    labels: &[u8],
    k: usize,
    metric: Metric,
    weighting: Weighting,
) -> Result<KnnModel> {
    if rows.is_empty() {
        return Err(Error::InvalidDataset("empty training set".into()));
    }
    let mut k = k.max(1);
    if k > rows.len() {
        log::warn!(
            "knn preset k={k} exceeds training size {}; clamping",
            rows.len()
        );
        k = rows.len();
    }
    Ok(KnnModel {
        xs: rows.to_vec(),
        ys: labels.to_vec(),
        k,
        metric,
        weighting,
    })
}

impl KnnModel {
    pub fn n_features(&self) -> usize {
        self.xs.first().map_or(0, |r| r.len())
    }

    /// Indices of the k nearest training rows, ordered by (distance,
    /// training index).
    pub fn neighbors(&self, x: &[f64]) -> Result<Vec<usize>> {
        check_dim(self.n_features(), x.len())?;
        let mut order: Vec<(f64, usize)> = self
            .xs
            .iter()
            .enumerate()
            .map(|(i, row)| (self.metric.distance(row, x), i))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(order.into_iter().take(self.k).map(|(_, i)| i).collect())
    }

    pub fn predict(&self, x: &[f64]) -> Result<(u8, f64)> {
        let neighbors = self.neighbors(x)?;
        let score = match self.weighting {
            Weighting::Uniform => {
                let ones = neighbors.iter().filter(|&&i| self.ys[i] == 1).count();
                ones as f64 / neighbors.len() as f64
            }
            Weighting::SquaredInverse => {
                let exact: Vec<usize> = neighbors
                    .iter()
                    .copied()
                    .filter(|&i| self.metric.distance(&self.xs[i], x) == 0.0)
                    .collect();
                if !exact.is_empty() {
                    // zero-distance rule: exact matches decide alone
                    let ones = exact.iter().filter(|&&i| self.ys[i] == 1).count();
                    ones as f64 / exact.len() as f64
                } else {
                    let mut w_total = 0.0;
                    let mut w_one = 0.0;
                    for &i in &neighbors {
                        let d = self.metric.distance(&self.xs[i], x);
                        let w = 1.0 / (d * d);
                        w_total += w;
                        if self.ys[i] == 1 {
                            w_one += w;
                        }
                    }
                    w_one / w_total
                }
            }
        };
        Ok((u8::from(score >= 0.5), score))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_nearest_neighbor() {
        let model = fit_knn_rows(
            &[vec![0.0, 0.0], vec![1.0, 1.0]],
            &[0, 1],
            1,
            Metric::Euclidean,
            Weighting::Uniform,
        )
        .unwrap();
        assert_eq!(model.predict(&[0.1, 0.1]).unwrap().0, 0);
    }

    #[test]
    fn exact_match_wins_under_squared_inverse() {
        let model = fit_knn_rows(
            &[vec![0.5, 0.5], vec![0.6, 0.5], vec![0.7, 0.5], vec![0.8, 0.5]],
            &[1, 0, 0, 0],
            4,
            Metric::Euclidean,
            Weighting::SquaredInverse,
        )
        .unwrap();
        assert_eq!(model.predict(&[0.5, 0.5]).unwrap(), (1, 1.0));
    }

    #[test]
    fn k_clamped_to_training_size() {
        let model = fit_knn_rows(
            &[vec![0.0], vec![1.0]],
            &[0, 1],
            100,
            Metric::Euclidean,
            Weighting::Uniform,
        )
        .unwrap();
        assert_eq!(model.k, 2);
    }

    #[test]
    fn distance_ties_break_by_training_order() {
        // two equidistant neighbors; k=1 must pick the earlier row
        let model = fit_knn_rows(
            &[vec![1.0], vec![-1.0]],
            &[1, 0],
            1,
            Metric::Euclidean,
            Weighting::Uniform,
        )
        .unwrap();
        assert_eq!(model.neighbors(&[0.0]).unwrap(), vec![0]);
    }

    #[test]
    fn cosine_distance_basics() {
        let m = Metric::Cosine;
        assert!((m.distance(&[1.0, 0.0], &[2.0, 0.0])).abs() < 1e-12);
        assert!((m.distance(&[1.0, 0.0], &[0.0, 3.0]) - 1.0).abs() < 1e-12);
        assert_eq!(m.distance(&[0.0, 0.0], &[1.0, 0.0]), 1.0);
    }

    #[test]
    fn minkowski3_matches_manual() {
        let m = Metric::Minkowski3;
        let d = m.distance(&[0.0, 0.0], &[1.0, 2.0]);
        assert!((d - 9.0f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn permutation_invariance_of_predictions() {
        let rows = vec![vec![0.1], vec![0.9], vec![0.2], vec![0.8]];
        let labels = vec![0, 1, 0, 1];
        let a = fit_knn_rows(&rows, &labels, 3, Metric::Euclidean, Weighting::Uniform).unwrap();
        let perm_rows = vec![rows[3].clone(), rows[1].clone(), rows[0].clone(), rows[2].clone()];
        let perm_labels = vec![1, 1, 0, 0];
        let b =
            fit_knn_rows(&perm_rows, &perm_labels, 3, Metric::Euclidean, Weighting::Uniform)
                .unwrap();
        // queries chosen so no tie straddles the k-th neighbor boundary
        for x in [[0.0], [0.45], [1.0], [0.3]] {
            assert_eq!(a.predict(&x).unwrap().0, b.predict(&x).unwrap().0);
        }
    }
}
