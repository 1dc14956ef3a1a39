//! Binary logistic regression fitted by iteratively reweighted least
//! squares with a small L2 ridge (1e-8) for stability on separable data.
//! Convergence: gradient infinity-norm below 1e-8, capped at 200 iterations.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::classifiers::check_dim;
use crate::error::Error;
use crate::Result;

const RIDGE: f64 = 1e-8;
const GRAD_TOL: f64 = 1e-8;
const MAX_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    /// `[w_1 .. w_d, intercept]`.
    pub weights: Vec<f64>,
    pub n_features: usize,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn design_row(x: &[f64]) -> Vec<f64> {
    let mut r = x.to_vec();
    r.push(1.0);
    r
}

/// Unpenalized log-likelihood of `weights` (intercept last) on the data.
pub fn log_likelihood(rows: &[Vec<f64>], labels: &[u8], weights: &[f64]) -> f64 {
    rows.iter()
        .zip(labels)
        .map(|(x, &y)| {
            let z: f64 = design_row(x).iter().zip(weights).map(|(a, b)| a * b).sum();
            // log sigma(z) if y=1 else log(1 - sigma(z)), in a stable form
            let log_sig = if z >= 0.0 {
                -(1.0 + (-z).exp()).ln()
            } else {
                z - (1.0 + z.exp()).ln()
            };
            if y == 1 {
                log_sig
            } else {
                // 1 - sigma(z) = sigma(z) * exp(-z)
                log_sig - z
            }
        })
        .sum()
}

/// Analytic gradient of the unpenalized log-likelihood.
pub fn log_likelihood_gradient(rows: &[Vec<f64>], labels: &[u8], weights: &[f64]) -> Vec<f64> {
    let dim = weights.len();
    let mut g = vec![0.0; dim];
    for (x, &y) in rows.iter().zip(labels) {
        let xr = design_row(x);
        let z: f64 = xr.iter().zip(weights).map(|(a, b)| a * b).sum();
        let r = y as f64 - sigmoid(z);
        for (gi, xi) in g.iter_mut().zip(&xr) {
            *gi += r * xi;
        }
    }
    g
}

/// Fit on explicit rows/labels.
pub fn fit_logistic_rows(rows: &[Vec<f64>], labels: &[u8]) -> Result<LogisticModel> {
    if rows.is_empty() {
        return Err(Error::InvalidDataset("empty training set".into()));
    }
    let n_features = rows[0].len();
    let dim = n_features + 1;
    let mut w = DVector::<f64>::zeros(dim);
    let design: Vec<Vec<f64>> = rows.iter().map(|r| design_row(r)).collect();

    for _ in 0..MAX_ITER {
        // Ridge-penalized gradient and Newton step.
        let wv: Vec<f64> = w.iter().copied().collect();
        let mut grad = DVector::from_vec(log_likelihood_gradient(rows, labels, &wv));
        grad -= RIDGE * &w;
        if grad.amax() < GRAD_TOL {
            break;
        }
        let mut hess = DMatrix::<f64>::zeros(dim, dim);
        for x in &design {
            let z: f64 = x.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
            let p = sigmoid(z);
            let r = p * (1.0 - p);
            for i in 0..dim {
                for j in 0..dim {
                    hess[(i, j)] += r * x[i] * x[j];
                }
            }
        }
        for i in 0..dim {
            hess[(i, i)] += RIDGE;
        }
        let step = hess
            .cholesky()
            .map(|c| c.solve(&grad))
            .unwrap_or_else(|| grad.clone() * 1e-3);
        w += step;
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Fit("logistic weights diverged".into()));
        }
    }
    Ok(LogisticModel {
        weights: w.iter().copied().collect(),
        n_features,
    })
}

pub fn predict_logistic(model: &LogisticModel, x: &[f64]) -> Result<(u8, f64)> {
    check_dim(model.n_features, x.len())?;
    let z: f64 = design_row(x)
        .iter()
        .zip(&model.weights)
        .map(|(a, b)| a * b)
        .sum();
    let p = sigmoid(z);
    Ok((u8::from(p >= 0.5), p))
}

impl LogisticModel {
    pub fn predict(&self, x: &[f64]) -> Result<(u8, f64)> {
        predict_logistic(self, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn antisymmetric_data() -> (Vec<Vec<f64>>, Vec<u8>) {
        // symmetric under label swap + feature negation
        let rows = vec![
            vec![1.0, 0.5],
            vec![2.0, -0.5],
            vec![0.5, 1.5],
            vec![-1.0, -0.5],
            vec![-2.0, 0.5],
            vec![-0.5, -1.5],
        ];
        (rows, vec![1, 1, 1, 0, 0, 0])
    }

    #[test]
    fn symmetric_data_zero_intercept() {
        let (rows, labels) = antisymmetric_data();
        let model = fit_logistic_rows(&rows, &labels).unwrap();
        assert!(model.weights[2].abs() < 1e-6, "intercept {}", model.weights[2]);
    }

    #[test]
    fn label_swap_flips_score() {
        let (rows, labels) = antisymmetric_data();
        let swapped: Vec<u8> = labels.iter().map(|&y| 1 - y).collect();
        let a = fit_logistic_rows(&rows, &labels).unwrap();
        let b = fit_logistic_rows(&rows, &swapped).unwrap();
        for x in [[0.3, 0.9], [-1.2, 0.1], [2.0, 2.0]] {
            let pa = a.predict(&x).unwrap().1;
            let pb = b.predict(&x).unwrap().1;
            assert!((pa + pb - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn separable_data_converges_finite() {
        let rows = vec![vec![0.0], vec![1.0], vec![10.0], vec![11.0]];
        let labels = vec![0, 0, 1, 1];
        let model = fit_logistic_rows(&rows, &labels).unwrap();
        assert!(model.weights.iter().all(|w| w.is_finite()));
        assert_eq!(model.predict(&[0.5]).unwrap().0, 0);
        assert_eq!(model.predict(&[10.5]).unwrap().0, 1);
    }

    #[test]
    fn all_weights_finite_on_real_shape() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 7) as f64 * 0.1, (i % 5) as f64 * 0.2])
            .collect();
        let labels: Vec<u8> = (0..40).map(|i| ((i % 7) > 3) as u8).collect();
        let model = fit_logistic_rows(&rows, &labels).unwrap();
        assert!(model.weights.iter().all(|w| w.is_finite()));
    }
}
