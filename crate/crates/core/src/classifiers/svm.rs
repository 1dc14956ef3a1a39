//! Soft-margin SVM trained by sequential minimal optimization.
//!
//! Labels are mapped to {-1, +1} internally. The solver is Platt-style SMO
//! with an error cache, deterministic first/second choice heuristics, KKT
//! tolerance 1e-3, and a hard cap of 1e5 passes over the data.

use serde::{Deserialize, Serialize};

use crate::classifiers::check_dim;
use crate::error::Error;
use crate::Result;

const KKT_TOL: f64 = 1e-3;
const ALPHA_EPS: f64 = 1e-12;
const MAX_PASSES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    Linear,
    /// `(x . y + 1)^degree`, degree 2 or 3.
    Polynomial { degree: u32 },
    /// `exp(-(|x - y| / scale)^2)`.
    Gaussian { scale: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        match *self {
            Kernel::Linear => dot,
            Kernel::Polynomial { degree } => (dot + 1.0).powi(degree as i32),
            Kernel::Gaussian { scale } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-d2 / (scale * scale)).exp()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: Kernel,
    /// Support vectors with their signed dual coefficient `alpha * y`.
    pub support: Vec<(Vec<f64>, f64)>,
    pub bias: f64,
    pub box_constraint: f64,
    pub n_features: usize,
}

struct Smo<'a> {
    rows: &'a [Vec<f64>],
    ys: Vec<f64>,
    kernel: Kernel,
    c: f64,
    alphas: Vec<f64>,
    errors: Vec<f64>,
    b: f64,
}

impl<'a> Smo<'a> {
    fn new(rows: &'a [Vec<f64>], ys: Vec<f64>, kernel: Kernel, c: f64) -> Self {
        let errors = ys.iter().map(|y| -y).collect();
        Smo {
            rows,
            ys,
            kernel,
            c,
            alphas: vec![0.0; rows.len()],
            errors,
            b: 0.0,
        }
    }

    fn k(&self, i: usize, j: usize) -> f64 {
        self.kernel.eval(&self.rows[i], &self.rows[j])
    }

    fn decision(&self, x: &[f64]) -> f64 {
        let mut s = self.b;
        for ((row, &a), &y) in self.rows.iter().zip(&self.alphas).zip(&self.ys) {
            if a > 0.0 {
                s += a * y * self.kernel.eval(row, x);
            }
        }
        s
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1_old, a2_old) = (self.alphas[i1], self.alphas[i2]);
        let (y1, y2) = (self.ys[i1], self.ys[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;
        let (lo, hi) = if s < 0.0 {
            (
                (a2_old - a1_old).max(0.0),
                (self.c + a2_old - a1_old).min(self.c),
            )
        } else {
            (
                (a2_old + a1_old - self.c).max(0.0),
                (a2_old + a1_old).min(self.c),
            )
        };
        if hi - lo < ALPHA_EPS {
            return false;
        }
        let k11 = self.k(i1, i1);
        let k12 = self.k(i1, i2);
        let k22 = self.k(i2, i2);
        let eta = k11 + k22 - 2.0 * k12;
        let mut a2 = if eta > 0.0 {
            (a2_old + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // kernel expansion without the bias term
            let sum1 = e1 + y1 - self.b;
            let sum2 = e2 + y2 - self.b;
            let f1 = y1 * sum1 - 1.0 - a1_old * k11 - s * a2_old * k12;
            let f2 = y2 * sum2 - 1.0 - s * a1_old * k12 - a2_old * k22;
            let l1 = a1_old + s * (a2_old - lo);
            let h1 = a1_old + s * (a2_old - hi);
            let obj_lo =
                l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
            let obj_hi =
                h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if obj_lo < obj_hi - ALPHA_EPS {
                lo
            } else if obj_hi < obj_lo - ALPHA_EPS {
                hi
            } else {
                a2_old
            }
        };
        if (a2 - a2_old).abs() < ALPHA_EPS * (a2 + a2_old + ALPHA_EPS) {
            return false;
        }
        if a2 < ALPHA_EPS {
            a2 = 0.0;
        } else if a2 > self.c - ALPHA_EPS {
            a2 = self.c;
        }
        let a1 = a1_old + s * (a2_old - a2);
        let a1 = a1.clamp(0.0, self.c);

        let d1 = y1 * (a1 - a1_old);
        let d2 = y2 * (a2 - a2_old);
        let b1 = self.b - e1 - d1 * k11 - d2 * k12;
        let b2 = self.b - e2 - d1 * k12 - d2 * k22;
        let b_new = if a1 > 0.0 && a1 < self.c {
            b1
        } else if a2 > 0.0 && a2 < self.c {
            b2
        } else {
            (b1 + b2) / 2.0
        };
        let db = b_new - self.b;
        self.b = b_new;
        for i in 0..self.rows.len() {
            self.errors[i] += d1 * self.k(i1, i) + d2 * self.k(i2, i) + db;
        }
        self.alphas[i1] = a1;
        self.alphas[i2] = a2;
        self.errors[i1] = self.decision(&self.rows[i1]) - self.ys[i1];
        self.errors[i2] = self.decision(&self.rows[i2]) - self.ys[i2];
        true
    }

    fn examine(&mut self, i2: usize) -> bool {
        let y2 = self.ys[i2];
        let a2 = self.alphas[i2];
        let e2 = self.errors[i2];
        let r2 = e2 * y2;
        if (r2 < -KKT_TOL && a2 < self.c) || (r2 > KKT_TOL && a2 > 0.0) {
            // second choice: maximize |e1 - e2| over non-bound points
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                if self.alphas[i] > 0.0 && self.alphas[i] < self.c {
                    let gap = (self.errors[i] - e2).abs();
                    if best.map_or(true, |(_, g)| gap > g) {
                        best = Some((i, gap));
                    }
                }
            }
            if let Some((i1, _)) = best {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
            for i1 in 0..self.rows.len() {
                if self.alphas[i1] > 0.0 && self.alphas[i1] < self.c && self.take_step(i1, i2) {
                    return true;
                }
            }
            for i1 in 0..self.rows.len() {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        false
    }

    fn max_kkt_violation(&self) -> f64 {
        let mut v: f64 = 0.0;
        for i in 0..self.rows.len() {
            let r = self.errors[i] * self.ys[i];
            if self.alphas[i] < self.c {
                v = v.max(-r);
            }
            if self.alphas[i] > 0.0 {
                v = v.max(r);
            }
        }
        v
    }

    fn objective(&self) -> f64 {
        let mut obj: f64 = self.alphas.iter().sum();
        for i in 0..self.rows.len() {
            if self.alphas[i] == 0.0 {
                continue;
            }
            for j in 0..self.rows.len() {
                if self.alphas[j] == 0.0 {
                    continue;
                }
                obj -= 0.5 * self.alphas[i] * self.alphas[j] * self.ys[i] * self.ys[j] * self.k(i, j);
            }
        }
        obj
    }
}

/// Fit an SVM on explicit rows/labels (labels in {0, 1}).
pub fn fit_svm_rows(
    rows: &[Vec<f64>],
    labels: &[u8],
    kernel: Kernel,
    box_constraint: f64,
) -> Result<SvmModel> {
    if labels.iter().all(|&y| y == 0) || labels.iter().all(|&y| y == 1) {
        return Err(Error::Fit("SVM needs both classes present".into()));
    }
    let ys: Vec<f64> = labels.iter().map(|&y| if y == 1 { 1.0 } else { -1.0 }).collect();
    let mut smo = Smo::new(rows, ys, kernel, box_constraint);

    let mut examine_all = true;
    let mut passes = 0usize;
    loop {
        let mut changed = 0usize;
        for i in 0..rows.len() {
            let candidate = examine_all || (smo.alphas[i] > 0.0 && smo.alphas[i] < smo.c);
            if candidate && smo.examine(i) {
                changed += 1;
            }
        }
        passes += 1;
        if passes > MAX_PASSES {
            return Err(Error::SmoNonConvergence {
                passes,
                violation: smo.max_kkt_violation(),
                objective: smo.objective(),
            });
        }
        if examine_all {
            if changed == 0 {
                break;
            }
            examine_all = false;
        } else if changed == 0 {
            examine_all = true;
        }
    }

    let support = rows
        .iter()
        .zip(smo.alphas.iter().zip(&smo.ys))
        .filter(|(_, (&a, _))| a > 0.0)
        .map(|(row, (&a, &y))| (row.clone(), a * y))
        .collect();
    Ok(SvmModel {
        kernel: smo.kernel,
        support,
        bias: smo.b,
        box_constraint,
        n_features: rows.first().map_or(0, |r| r.len()),
    })
}

pub fn predict_svm(model: &SvmModel, x: &[f64]) -> Result<(u8, f64)> {
    check_dim(model.n_features, x.len())?;
    let score: f64 = model.bias
        + model
            .support
            .iter()
            .map(|(sv, coef)| coef * model.kernel.eval(sv, x))
            .sum::<f64>();
    Ok((u8::from(score >= 0.0), score))
}

impl SvmModel {
    pub fn predict(&self, x: &[f64]) -> Result<(u8, f64)> {
        predict_svm(self, x)
    }

    /// Dual objective value at the stored solution. Non-support alphas are
    /// zero and contribute nothing.
    pub fn dual_objective(&self, kernel: &Kernel) -> f64 {
        let mut obj: f64 = self.support.iter().map(|(_, c)| c.abs()).sum();
        for (xi, ci) in &self.support {
            for (xj, cj) in &self.support {
                obj -= 0.5 * ci * cj * kernel.eval(xi, xj);
            }
        }
        obj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_kernel_identity() {
        let k = Kernel::Gaussian { scale: 1.4 };
        assert_eq!(k.eval(&[0.3, -0.7], &[0.3, -0.7]), 1.0);
    }

    #[test]
    fn two_point_boundary() {
        let rows = vec![vec![0.0, 0.0], vec![2.0, 2.0]];
        let model = fit_svm_rows(&rows, &[0, 1], Kernel::Linear, 1e6).unwrap();
        let mid = model.predict(&[1.0, 1.0]).unwrap().1;
        assert!(mid.abs() < 1e-6, "score at midpoint {mid}");
        assert_eq!(model.predict(&[0.1, 0.1]).unwrap().0, 0);
        assert_eq!(model.predict(&[1.9, 1.9]).unwrap().0, 1);
        // boundary is perpendicular to the segment: points offset along the
        // perpendicular direction keep score ~0
        let p = model.predict(&[1.5, 0.5]).unwrap().1;
        assert!(p.abs() < 1e-6, "perpendicular offset score {p}");
    }

    #[test]
    fn duals_respect_box() {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![(i % 4) as f64, (i % 3) as f64])
            .collect();
        let labels: Vec<u8> = (0..12).map(|i| ((i % 4) >= 2) as u8).collect();
        let c = 0.7;
        let model = fit_svm_rows(&rows, &labels, Kernel::Gaussian { scale: 1.0 }, c).unwrap();
        for (_, coef) in &model.support {
            assert!(coef.abs() <= c + 1e-12);
            assert!(coef.abs() > 0.0);
        }
    }

    #[test]
    fn single_class_rejected() {
        let rows = vec![vec![0.0], vec![1.0]];
        assert!(fit_svm_rows(&rows, &[1, 1], Kernel::Linear, 1.0).is_err());
    }

    #[test]
    fn fit_is_deterministic() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![((i * 13) % 7) as f64 * 0.3, ((i * 5) % 11) as f64 * 0.2])
            .collect();
        let labels: Vec<u8> = (0..20).map(|i| (((i * 13) % 7) > 3) as u8).collect();
        let a = fit_svm_rows(&rows, &labels, Kernel::Polynomial { degree: 2 }, 1.0).unwrap();
        let b = fit_svm_rows(&rows, &labels, Kernel::Polynomial { degree: 2 }, 1.0).unwrap();
        assert_eq!(a, b);
    }
}
