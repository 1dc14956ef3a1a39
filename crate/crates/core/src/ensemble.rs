//! Ensemble methods over the base classifiers: AdaBoost.M1, bagging,
//! RUSBoost, and random-subspace ensembles.
//!
//! Boosting members carry a stagewise weight and predict as a signed
//! margin; bagging votes and subspace ensembles average member scores.
//! All randomized methods are deterministic given (dataset, seed), with
//! per-member sub-seeds pre-assigned by purpose string.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::classifiers::knn::{fit_knn_rows, Metric, Weighting};
use crate::classifiers::discriminant::{fit_discriminant_rows, DiscriminantKind};
use crate::classifiers::preset::TrainedModel;
use crate::classifiers::scaler::Scaler;
use crate::classifiers::tree::fit_tree_rows;
use crate::classifiers::check_dim;
use crate::error::Error;
use crate::rng::derive_rng;
use crate::Result;

/// Cap applied to a member weight when a round classifies perfectly.
const PERFECT_ROUND_LOG_ODDS: f64 = 23.025850929940457; // ln(1e10)

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnsembleMethod {
    AdaBoost,
    Bagging,
    RusBoost,
    Subspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubspaceBase {
    Discriminant,
    Knn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub model: TrainedModel,
    pub weight: f64,
    /// Feature indices the member was trained on (all features except for
    /// subspace members).
    pub features: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub method: EnsembleMethod,
    pub members: Vec<EnsembleMember>,
    pub n_features: usize,
    pub learning_rate: f64,
    /// Weighted training error of each retained boosting round.
    pub round_errors: Vec<f64>,
}

impl EnsembleModel {
    /// True for methods whose score is a probability-type vote average
    /// (threshold 0.5) rather than a signed margin (threshold 0).
    pub fn vote_averaged(&self) -> bool {
        matches!(self.method, EnsembleMethod::Bagging | EnsembleMethod::Subspace)
    }

    pub fn predict(&self, x: &[f64]) -> Result<(u8, f64)> {
        check_dim(self.n_features, x.len())?;
        match self.method {
            EnsembleMethod::AdaBoost | EnsembleMethod::RusBoost => {
                let mut score = 0.0;
                for m in &self.members {
                    let (label, _) = m.model.predict(x)?;
                    let h = if label == 1 { 1.0 } else { -1.0 };
                    score += m.weight * h;
                }
                Ok((u8::from(score >= 0.0), score))
            }
            EnsembleMethod::Bagging => {
                let mut ones = 0usize;
                for m in &self.members {
                    if m.model.predict(x)?.0 == 1 {
                        ones += 1;
                    }
                }
                let score = ones as f64 / self.members.len() as f64;
                Ok((u8::from(score >= 0.5), score))
            }
            EnsembleMethod::Subspace => {
                let mut sum = 0.0;
                for m in &self.members {
                    let projected: Vec<f64> = m.features.iter().map(|&f| x[f]).collect();
                    sum += m.model.predict(&projected)?.1;
                }
                let score = sum / self.members.len() as f64;
                Ok((u8::from(score >= 0.5), score))
            }
        }
    }
}

fn check_two_classes(labels: &[u8]) -> Result<()> {
    if labels.iter().all(|&y| y == 0) || labels.iter().all(|&y| y == 1) {
        return Err(Error::Fit("ensemble needs both classes present".into()));
    }
    Ok(())
}

fn all_features(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// One boosting round's bookkeeping shared by AdaBoost and RUSBoost:
/// weighted error on the full set, member weight, and the weight update.
/// Returns `None` when the round must stop without retaining the member.
fn boost_round(
    preds: &[u8],
    labels: &[u8],
    weights: &mut [f64],
    learning_rate: f64,
) -> Option<(f64, f64, bool)> {
    let eps: f64 = preds
        .iter()
        .zip(labels)
        .zip(weights.iter())
        .filter(|((p, y), _)| p != y)
        .map(|(_, &w)| w)
        .sum();
    if eps >= 0.5 {
        return None;
    }
    if eps <= 0.0 {
        // perfect round: capped weight, boosting stops afterwards
        return Some((0.0, learning_rate * 0.5 * PERFECT_ROUND_LOG_ODDS, true));
    }
    let alpha = learning_rate * 0.5 * ((1.0 - eps) / eps).ln();
    let mut total = 0.0;
    for ((p, y), w) in preds.iter().zip(labels).zip(weights.iter_mut()) {
        *w *= if p == y { (-alpha).exp() } else { alpha.exp() };
        total += *w;
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
    Some((eps, alpha, false))
}

/// AdaBoost.M1 over weight-accepting trees.
pub fn fit_adaboost_rows(
    rows: &[Vec<f64>],
    labels: &[u8],
    n_learners: usize,
    learning_rate: f64,
    max_splits: usize,
) -> Result<EnsembleModel> {
    check_two_classes(labels)?;
    if n_learners == 0 {
        return Err(Error::InvalidConfig("n_learners must be at least 1".into()));
    }
    let n = rows.len();
    let n_features = rows[0].len();
    let mut weights = vec![1.0 / n as f64; n];
    let mut members = Vec::new();
    let mut round_errors = Vec::new();
    for _ in 0..n_learners {
        let tree = fit_tree_rows(rows, labels, Some(&weights), max_splits)?;
        let preds: Vec<u8> = rows
            .iter()
            .map(|r| tree.predict(r).map(|(l, _)| l))
            .collect::<Result<_>>()?;
        match boost_round(&preds, labels, &mut weights, learning_rate) {
            None => break,
            Some((eps, alpha, stop)) => {
                round_errors.push(eps);
                members.push(EnsembleMember {
                    model: TrainedModel::Tree(tree),
                    weight: alpha,
                    features: all_features(n_features),
                });
                if stop {
                    break;
                }
            }
        }
    }
    Ok(EnsembleModel {
        method: EnsembleMethod::AdaBoost,
        members,
        n_features,
        learning_rate,
        round_errors,
    })
}

/// Bootstrap indices for one bagging member: `n` draws with replacement.
pub fn bootstrap_indices(seed: u64, member: usize, n: usize) -> Vec<usize> {
    let mut rng = derive_rng(seed, &format!("bag-member/{member}"));
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// Bagged deep trees (max_splits = n - 1), unweighted vote.
pub fn fit_bagging_rows(
    rows: &[Vec<f64>],
    labels: &[u8],
    n_learners: usize,
    seed: u64,
) -> Result<EnsembleModel> {
    check_two_classes(labels)?;
    if n_learners == 0 {
        return Err(Error::InvalidConfig("n_learners must be at least 1".into()));
    }
    let n = rows.len();
    let n_features = rows[0].len();
    let mut members = Vec::new();
    for m in 0..n_learners {
        let idx = bootstrap_indices(seed, m, n);
        let brows: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].clone()).collect();
        let blabels: Vec<u8> = idx.iter().map(|&i| labels[i]).collect();
        let tree = fit_tree_rows(&brows, &blabels, None, n.saturating_sub(1).max(1))?;
        members.push(EnsembleMember {
            model: TrainedModel::Tree(tree),
            weight: 1.0,
            features: all_features(n_features),
        });
    }
    Ok(EnsembleModel {
        method: EnsembleMethod::Bagging,
        members,
        n_features,
        learning_rate: 1.0,
        round_errors: Vec::new(),
    })
}

/// Weighted sample of `count` distinct indices from `candidates` without
/// replacement, proportional to `weights` (exponential-keys method).
fn weighted_sample_without_replacement(
    candidates: &[usize],
    weights: &[f64],
    count: usize,
    rng: &mut crate::rng::Rng,
) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = candidates
        .iter()
        .map(|&i| {
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            let w = weights[i].max(1e-300);
            (u.ln() / w, i)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut picked: Vec<usize> = keyed.into_iter().take(count).map(|(_, i)| i).collect();
    picked.sort_unstable();
    picked
}

/// RUSBoost: AdaBoost with per-round random undersampling of the majority
/// class down to the minority count. Weight bookkeeping runs on the full
/// set.
pub fn fit_rusboost_rows(
    rows: &[Vec<f64>],
    labels: &[u8],
    n_learners: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<EnsembleModel> {
    check_two_classes(labels)?;
    if n_learners == 0 {
        return Err(Error::InvalidConfig("n_learners must be at least 1".into()));
    }
    let n = rows.len();
    let n_features = rows[0].len();
    let ones = labels.iter().filter(|&&y| y == 1).count();
    let zeros = n - ones;
    let (majority, minority_count) = if ones > zeros {
        (1u8, zeros)
    } else {
        (0u8, ones)
    };
    let mut weights = vec![1.0 / n as f64; n];
    let mut members = Vec::new();
    let mut round_errors = Vec::new();
    for t in 0..n_learners {
        let mut rng = derive_rng(seed, &format!("rus-round/{t}"));
        let majority_idx: Vec<usize> = (0..n).filter(|&i| labels[i] == majority).collect();
        let minority_idx: Vec<usize> = (0..n).filter(|&i| labels[i] != majority).collect();
        let sampled =
            weighted_sample_without_replacement(&majority_idx, &weights, minority_count, &mut rng);
        let mut selected: Vec<usize> = minority_idx;
        selected.extend(sampled);
        selected.sort_unstable();
        let srows: Vec<Vec<f64>> = selected.iter().map(|&i| rows[i].clone()).collect();
        let slabels: Vec<u8> = selected.iter().map(|&i| labels[i]).collect();
        let sweights: Vec<f64> = selected.iter().map(|&i| weights[i]).collect();
        let tree = fit_tree_rows(&srows, &slabels, Some(&sweights), 20)?;
        let preds: Vec<u8> = rows
            .iter()
            .map(|r| tree.predict(r).map(|(l, _)| l))
            .collect::<Result<_>>()?;
        match boost_round(&preds, labels, &mut weights, learning_rate) {
            None => break,
            Some((eps, alpha, stop)) => {
                round_errors.push(eps);
                members.push(EnsembleMember {
                    model: TrainedModel::Tree(tree),
                    weight: alpha,
                    features: all_features(n_features),
                });
                if stop {
                    break;
                }
            }
        }
    }
    Ok(EnsembleModel {
        method: EnsembleMethod::RusBoost,
        members,
        n_features,
        learning_rate,
        round_errors,
    })
}

/// The feature subset a given subspace member trains on, derived from the
/// ensemble seed (replayable).
pub fn subspace_subset(seed: u64, member: usize, dim: usize, n_features: usize) -> Vec<usize> {
    let mut rng = derive_rng(seed, &format!("subspace-member/{member}"));
    let mut pool: Vec<usize> = (0..n_features).collect();
    for i in 0..dim.min(n_features) {
        let j = rng.gen_range(i..n_features);
        pool.swap(i, j);
    }
    let mut subset = pool[..dim.min(n_features)].to_vec();
    subset.sort_unstable();
    subset
}

/// Random-subspace ensemble over discriminant or 1-NN base learners.
pub fn fit_subspace_rows(
    rows: &[Vec<f64>],
    labels: &[u8],
    base: SubspaceBase,
    n_learners: usize,
    subspace_dim: usize,
    seed: u64,
) -> Result<EnsembleModel> {
    check_two_classes(labels)?;
    let n_features = rows[0].len();
    if subspace_dim == 0 || subspace_dim > n_features {
        return Err(Error::InvalidConfig(format!(
            "subspace_dim must be in 1..={n_features}, got {subspace_dim}"
        )));
    }
    if n_learners == 0 {
        return Err(Error::InvalidConfig("n_learners must be at least 1".into()));
    }
    let mut members = Vec::new();
    for m in 0..n_learners {
        let subset = subspace_subset(seed, m, subspace_dim, n_features);
        let projected: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| subset.iter().map(|&f| r[f]).collect())
            .collect();
        let model = match base {
            SubspaceBase::Discriminant => TrainedModel::Discriminant(fit_discriminant_rows(
                &projected,
                labels,
                DiscriminantKind::Linear,
            )?),
            SubspaceBase::Knn => {
                let scaler = Scaler::fit(&projected);
                let knn = fit_knn_rows(
                    &scaler.transform(&projected),
                    labels,
                    1,
                    Metric::Euclidean,
                    Weighting::Uniform,
                )?;
                TrainedModel::Knn { scaler, model: knn }
            }
        };
        members.push(EnsembleMember {
            model,
            weight: 1.0,
            features: subset,
        });
    }
    Ok(EnsembleModel {
        method: EnsembleMethod::Subspace,
        members,
        n_features,
        learning_rate: 1.0,
        round_errors: Vec::new(),
    })
}
