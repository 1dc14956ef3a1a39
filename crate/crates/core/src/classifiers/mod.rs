//! From-scratch base classifiers: decision trees, discriminant analysis,
//! logistic regression, SVMs, and KNN, plus the named preset registry.
//!
//! Shared contracts:
//! - every fit is a pure function of (dataset order, preset, weights);
//! - every predict returns `(label, score)` with label 1 iff the score
//!   reaches the family threshold (0.5 for probability scores, 0 for
//!   margins), exact ties predicting class 1;
//! - every predict rejects feature vectors of the wrong length.

pub mod discriminant;
pub mod knn;
pub mod logistic;
pub mod preset;
pub mod scaler;
pub mod svm;
pub mod tree;

pub use discriminant::{fit_discriminant_rows, DiscriminantKind, DiscriminantModel};
pub use knn::{fit_knn_rows, KnnModel, Metric, Weighting};
pub use logistic::{fit_logistic_rows, log_likelihood, log_likelihood_gradient, LogisticModel};
pub use preset::{
    all_table1_presets, fit_preset, fit_preset_rows, lookup_preset, Preset, PresetKind,
    TrainedModel,
};
pub use scaler::Scaler;
pub use svm::{fit_svm_rows, Kernel, SvmModel};
pub use tree::{fit_tree_rows, TreeModel, TreeNode};

use crate::error::Error;
use crate::Result;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
