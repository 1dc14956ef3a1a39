//! Stratified k-fold cross-validation, confusion-matrix metrics, the
//! classifier leaderboard, and plot-data exports.
//!
//! Metrics come from the single pooled confusion matrix over all folds.
//! Accuracy renders to one decimal place in percent.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::classifiers::preset::{fit_preset_rows, lookup_preset, Preset};
use crate::dataset::Dataset;
use crate::error::Error;
use crate::rng::{derive_rng, derive_seed};
use crate::Result;

/// A partition of the dataset into k folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold index per sample.
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    /// Stratified plan: per-class fold counts differ by at most one, and so
    /// do overall fold sizes. Deterministic given seed.
    pub fn stratified(ds: &Dataset, k: usize, seed: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidConfig("k must be at least 2".into()));
        }
        let counts = ds.class_counts();
        for (c, &count) in counts.iter().enumerate() {
            if count < k {
                return Err(Error::InvalidConfig(format!(
                    "class {c} has {count} samples, fewer than k = {k}"
                )));
            }
        }
        let mut rng = derive_rng(seed, "kfold");
        let mut assignments = vec![0usize; ds.len()];
        // Deal each class round-robin; the cursor carries across classes so
        // overall fold sizes stay within one of each other.
        let mut cursor = 0usize;
        for class in 0..2u8 {
            let mut idx: Vec<usize> = (0..ds.len())
                .filter(|&i| ds.samples[i].target == class)
                .collect();
            idx.shuffle(&mut rng);
            for i in idx {
                assignments[i] = cursor % k;
                cursor += 1;
            }
        }
        Ok(Self { k, assignments })
    }

    /// Unstratified plan: a seeded shuffle dealt round-robin.
    pub fn unstratified(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k < 2 || n < k {
            return Err(Error::InvalidConfig(format!(
                "need k >= 2 and n >= k, got n = {n}, k = {k}"
            )));
        }
        let mut rng = derive_rng(seed, "kfold-unstratified");
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let mut assignments = vec![0usize; n];
        for (pos, i) in idx.into_iter().enumerate() {
            assignments[i] = pos % k;
        }
        Ok(Self { k, assignments })
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// 2x2 confusion counts indexed `[true class][predicted class]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 2]; 2],
}

impl ConfusionMatrix {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u8, u8)>) -> Self {
        let mut m = Self::default();
        for (truth, pred) in pairs {
            m.counts[truth as usize][pred as usize] += 1;
        }
        m
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let correct = self.counts[0][0] + self.counts[1][1];
        correct as f64 / self.total() as f64
    }

    /// (TPR, FNR) per true class; `None` when the class has no samples.
    pub fn tpr_fnr(&self) -> [Option<(f64, f64)>; 2] {
        [0, 1].map(|c| {
            let row: u64 = self.counts[c].iter().sum();
            if row == 0 {
                None
            } else {
                let tpr = self.counts[c][c] as f64 / row as f64;
                Some((tpr, 1.0 - tpr))
            }
        })
    }

    /// (PPV, FDR) per predicted class; `None` when nothing was predicted
    /// as that class.
    pub fn ppv_fdr(&self) -> [Option<(f64, f64)>; 2] {
        [0, 1].map(|c| {
            let col = self.counts[0][c] + self.counts[1][c];
            if col == 0 {
                None
            } else {
                let ppv = self.counts[c][c] as f64 / col as f64;
                Some((ppv, 1.0 - ppv))
            }
        })
    }
}

/// Pooled cross-validation metrics for one classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: String,
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub tpr_fnr: [Option<(f64, f64)>; 2],
    pub ppv_fdr: [Option<(f64, f64)>; 2],
    pub fold_accuracies: Vec<f64>,
}

/// Cross-validation output: the report plus the pooled out-of-fold
/// prediction per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub report: EvalReport,
    pub predictions: Vec<u8>,
}

/// Fit on out-of-fold rows and predict held-out rows, fold by fold.
pub fn cross_validate(
    ds: &Dataset,
    preset: &Preset,
    plan: &FoldPlan,
    seed: u64,
) -> Result<CvOutcome> {
    if plan.assignments.len() != ds.len() {
        return Err(Error::InvalidConfig(format!(
            "fold plan covers {} samples, dataset has {}",
            plan.assignments.len(),
            ds.len()
        )));
    }
    let rows = ds.feature_rows();
    let labels = ds.labels();
    let mut predictions = vec![0u8; ds.len()];
    let mut fold_accuracies = Vec::with_capacity(plan.k);
    for fold in 0..plan.k {
        let train: Vec<usize> = (0..ds.len())
            .filter(|&i| plan.assignments[i] != fold)
            .collect();
        let test: Vec<usize> = (0..ds.len())
            .filter(|&i| plan.assignments[i] == fold)
            .collect();
        let train_rows: Vec<Vec<f64>> = train.iter().map(|&i| rows[i].clone()).collect();
        let train_labels: Vec<u8> = train.iter().map(|&i| labels[i]).collect();
        let fit_seed = derive_seed(seed, &format!("{}/fold{fold}", preset.name));
        let model = fit_preset_rows(&train_rows, &train_labels, preset, fit_seed).map_err(|e| {
            Error::Fold {
                fold,
                source: Box::new(e),
            }
        })?;
        let mut correct = 0usize;
        for &i in &test {
            let (label, _) = model.predict(&rows[i]).map_err(|e| Error::Fold {
                fold,
                source: Box::new(e),
            })?;
            predictions[i] = label;
            if label == labels[i] {
                correct += 1;
            }
        }
        fold_accuracies.push(correct as f64 / test.len() as f64);
    }
    let confusion = ConfusionMatrix::from_pairs(labels.iter().copied().zip(predictions.iter().copied()));
    let report = EvalReport {
        classifier: preset.name.clone(),
        accuracy: confusion.accuracy(),
        tpr_fnr: confusion.tpr_fnr(),
        ppv_fdr: confusion.ppv_fdr(),
        confusion,
        fold_accuracies,
    };
    Ok(CvOutcome {
        report,
        predictions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub report: EvalReport,
    /// Competition rank by accuracy (1 = best).
    pub rank: usize,
    pub winner: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaderboard {
    pub rows: Vec<LeaderboardRow>,
}

/// Evaluate every preset on one shared fold plan so rows are comparable.
/// Rows keep input order; ranks are by accuracy and the first rank-1 row is
/// flagged winner.
pub fn run_leaderboard(
    ds: &Dataset,
    preset_names: &[String],
    k: usize,
    seed: u64,
) -> Result<(Leaderboard, Vec<CvOutcome>)> {
    if preset_names.is_empty() {
        return Err(Error::InvalidConfig("preset list must be nonempty".into()));
    }
    let presets: Vec<Preset> = preset_names
        .iter()
        .map(|n| lookup_preset(n))
        .collect::<Result<_>>()?;
    let plan = FoldPlan::stratified(ds, k, seed)?;
    let outcomes: Vec<CvOutcome> = presets
        .iter()
        .map(|p| cross_validate(ds, p, &plan, seed))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(outcomes.len());
    for (i, outcome) in outcomes.iter().enumerate() {
        let rank = 1 + outcomes
            .iter()
            .filter(|o| o.report.accuracy > outcome.report.accuracy)
            .count();
        let winner = rank == 1
            && !outcomes[..i]
                .iter()
                .any(|o| o.report.accuracy >= outcome.report.accuracy);
        rows.push(LeaderboardRow {
            report: outcome.report.clone(),
            rank,
            winner,
        });
    }
    Ok((Leaderboard { rows }, outcomes))
}

impl Leaderboard {
    /// Aligned plain-text table; the winner row is flagged.
    pub fn render_text(&self) -> String {
        let name_width = self
            .rows
            .iter()
            .map(|r| r.report.classifier.len())
            .max()
            .unwrap_or(10)
            .max("Classifier".len());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<name_width$}  {:>12}  {:>4}",
            "Classifier", "Accuracy (%)", "Rank"
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<name_width$}  {:>12.1}  {:>4}{}",
                row.report.classifier,
                row.report.accuracy * 100.0,
                row.rank,
                if row.winner { "  <- best" } else { "" }
            );
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("Classifier,AccuracyPct\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.1}",
                row.report.classifier,
                row.report.accuracy * 100.0
            );
        }
        out
    }
}

/// Scatter-plot rows: `bac,pulse_rate,target`, values verbatim.
pub fn export_scatter(ds: &Dataset) -> String {
    let mut out = String::from("bac,pulse_rate,target\n");
    for s in &ds.samples {
        let _ = writeln!(out, "{},{},{}", s.bac, s.pulse_rate, s.target);
    }
    out
}

/// Parallel-coordinates rows: min-max normalized features, target, and a
/// correct/incorrect flag per aligned prediction.
pub fn export_parallel_coords(ds: &Dataset, predictions: &[u8]) -> Result<String> {
    if predictions.len() != ds.len() {
        return Err(Error::InvalidConfig(format!(
            "{} predictions for {} samples",
            predictions.len(),
            ds.len()
        )));
    }
    let norm = |get: fn(&crate::dataset::Sample) -> f64| {
        let min = ds.samples.iter().map(get).fold(f64::INFINITY, f64::min);
        let max = ds.samples.iter().map(get).fold(f64::NEG_INFINITY, f64::max);
        let span = max - min;
        move |v: f64| if span > 0.0 { (v - min) / span } else { 0.0 }
    };
    let nb = norm(|s| s.bac);
    let np = norm(|s| s.pulse_rate);
    let mut out = String::from("bac_norm,pulse_rate_norm,target,correct\n");
    for (s, &p) in ds.samples.iter().zip(predictions) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            nb(s.bac),
            np(s.pulse_rate),
            s.target,
            u8::from(p == s.target)
        );
    }
    Ok(out)
}
