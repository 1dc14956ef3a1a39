//! Linear and quadratic discriminant analysis.
//!
//! Linear pools one covariance across classes; quadratic estimates one per
//! class. Covariances are regularized by adding eps * I with
//! eps = 1e-6 * mean(diagonal) whenever Cholesky factorization fails.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::classifiers::check_dim;
use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscriminantKind {
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantModel {
    pub kind: DiscriminantKind,
    pub means: [Vec<f64>; 2],
    /// Row-major covariance per class; identical for both classes when
    /// linear (pooled).
    pub covariances: [Vec<Vec<f64>>; 2],
    pub priors: [f64; 2],
    pub n_features: usize,
}

fn to_matrix(rows: &[Vec<f64>]) -> Vec<DVector<f64>> {
    rows.iter()
        .map(|r| DVector::from_column_slice(r))
        .collect()
}

fn mean(vs: &[DVector<f64>], dim: usize) -> DVector<f64> {
    let mut m = DVector::zeros(dim);
    for v in vs {
        m += v;
    }
    m / vs.len() as f64
}

fn scatter(vs: &[DVector<f64>], mu: &DVector<f64>, dim: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(dim, dim);
    for v in vs {
        let d = v - mu;
        s += &d * d.transpose();
    }
    s
}

fn regularize(mut cov: DMatrix<f64>) -> (DMatrix<f64>, Cholesky<f64, nalgebra::Dyn>) {
    let dim = cov.nrows();
    loop {
        if let Some(chol) = Cholesky::new(cov.clone()) {
            return (cov, chol);
        }
        let mean_diag = cov.diagonal().iter().sum::<f64>() / dim as f64;
        let eps = 1e-6 * if mean_diag > 0.0 { mean_diag } else { 1.0 };
        for i in 0..dim {
            cov[(i, i)] += eps;
        }
    }
}

fn mat_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Fit a discriminant model on explicit rows/labels.
pub fn fit_discriminant_rows(
    rows: &[Vec<f64>],
    labels: &[u8],
    kind: DiscriminantKind,
) -> Result<DiscriminantModel> {
    let dim = rows.first().map_or(0, |r| r.len());
    let mut class_rows: [Vec<DVector<f64>>; 2] = [Vec::new(), Vec::new()];
    for (r, &y) in to_matrix(rows).into_iter().zip(labels) {
        class_rows[y as usize].push(r);
    }
    for (c, crs) in class_rows.iter().enumerate() {
        if crs.len() < 2 {
            return Err(Error::Fit(format!(
                "class {c} has {} samples; covariance needs at least 2",
                crs.len()
            )));
        }
    }
    let n = rows.len() as f64;
    let means = [
        mean(&class_rows[0], dim),
        mean(&class_rows[1], dim),
    ];
    let scatters = [
        scatter(&class_rows[0], &means[0], dim),
        scatter(&class_rows[1], &means[1], dim),
    ];
    let covariances = match kind {
        DiscriminantKind::Linear => {
            let pooled = (&scatters[0] + &scatters[1]) / (n - 2.0);
            let (cov, _) = regularize(pooled);
            [cov.clone(), cov]
        }
        DiscriminantKind::Quadratic => {
            let c0 = &scatters[0] / (class_rows[0].len() as f64 - 1.0);
            let c1 = &scatters[1] / (class_rows[1].len() as f64 - 1.0);
            [regularize(c0).0, regularize(c1).0]
        }
    };
    Ok(DiscriminantModel {
        kind,
        means: [
            means[0].iter().copied().collect(),
            means[1].iter().copied().collect(),
        ],
        covariances: [mat_to_rows(&covariances[0]), mat_to_rows(&covariances[1])],
        priors: [class_rows[0].len() as f64 / n, class_rows[1].len() as f64 / n],
        n_features: dim,
    })
}

fn log_density(x: &DVector<f64>, mu: &DVector<f64>, cov: &DMatrix<f64>) -> f64 {
    let dim = x.len() as f64;
    let chol = regularize(cov.clone()).1;
    let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
    let d = x - mu;
    let solved = chol.solve(&d);
    let mahal = d.dot(&solved);
    -0.5 * (dim * (2.0 * std::f64::consts::PI).ln() + log_det + mahal)
}

/// Posterior probability of class 1 at `x`.
pub fn posterior_one(model: &DiscriminantModel, x: &[f64]) -> Result<f64> {
    check_dim(model.n_features, x.len())?;
    let xv = DVector::from_column_slice(x);
    let mut log_posts = [0.0f64; 2];
    for c in 0..2 {
        let mu = DVector::from_column_slice(&model.means[c]);
        let cov = DMatrix::from_fn(model.n_features, model.n_features, |i, j| {
            model.covariances[c][i][j]
        });
        log_posts[c] = model.priors[c].ln() + log_density(&xv, &mu, &cov);
    }
    // stable softmax over two log-joints
    let m = log_posts[0].max(log_posts[1]);
    let e0 = (log_posts[0] - m).exp();
    let e1 = (log_posts[1] - m).exp();
    Ok(e1 / (e0 + e1))
}

pub fn predict_discriminant(model: &DiscriminantModel, x: &[f64]) -> Result<(u8, f64)> {
    let p1 = posterior_one(model, x)?;
    Ok((u8::from(p1 >= 0.5), p1))
}

impl DiscriminantModel {
    pub fn predict(&self, x: &[f64]) -> Result<(u8, f64)> {
        predict_discriminant(self, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric_rows() -> (Vec<Vec<f64>>, Vec<u8>) {
        let rows = vec![
            vec![-1.5, 0.0],
            vec![-1.0, 0.5],
            vec![-0.5, -0.5],
            vec![1.5, 0.0],
            vec![1.0, 0.5],
            vec![0.5, -0.5],
        ];
        (rows, vec![0, 0, 0, 1, 1, 1])
    }

    #[test]
    fn boundary_sits_between_symmetric_classes() {
        let (rows, labels) = symmetric_rows();
        let model = fit_discriminant_rows(&rows, &labels, DiscriminantKind::Linear).unwrap();
        assert_eq!(model.predict(&[-0.5, 0.0]).unwrap().0, 0);
        assert_eq!(model.predict(&[0.5, 0.0]).unwrap().0, 1);
        let p = posterior_one(&model, &[0.0, 0.0]).unwrap();
        assert!((p - 0.5).abs() < 1e-9);
    }

    #[test]
    fn identical_classes_tie_to_one() {
        // same points in both classes -> posterior 0.5 everywhere -> label 1
        let rows = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
        ];
        let labels = vec![0, 0, 1, 1];
        let model = fit_discriminant_rows(&rows, &labels, DiscriminantKind::Linear).unwrap();
        let (label, score) = model.predict(&[0.3, 0.7]).unwrap();
        assert!((score - 0.5).abs() < 1e-9);
        assert_eq!(label, 1);
    }

    #[test]
    fn small_class_rejected() {
        let rows = vec![vec![0.0], vec![1.0], vec![2.0]];
        let labels = vec![0, 0, 1];
        assert!(fit_discriminant_rows(&rows, &labels, DiscriminantKind::Quadratic).is_err());
    }

    #[test]
    fn quadratic_handles_unequal_spreads() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            rows.push(vec![0.1 * i as f64, 0.05 * i as f64]);
            labels.push(0);
            rows.push(vec![5.0 + i as f64, 3.0 + 0.5 * i as f64]);
            labels.push(1);
        }
        let model = fit_discriminant_rows(&rows, &labels, DiscriminantKind::Quadratic).unwrap();
        assert_eq!(model.predict(&[0.2, 0.1]).unwrap().0, 0);
        assert_eq!(model.predict(&[9.0, 5.0]).unwrap().0, 1);
    }
}
