//! CART-style binary decision tree with weighted Gini splits.
//!
//! Growth is best-first: the frontier leaf whose best split yields the
//! largest weighted impurity decrease is expanded next, until `max_splits`
//! internal nodes exist, nodes are pure, or no split improves. Candidate
//! thresholds are midpoints between consecutive distinct sorted feature
//! values; ties break toward the lower feature index, then the lower
//! threshold, then the earlier-created leaf.

use serde::{Deserialize, Serialize};

use crate::classifiers::check_dim;
use crate::error::Error;
use crate::Result;

const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        label: u8,
        /// Weighted fraction of class 1 at the leaf.
        prob_one: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Samples with `x[feature] <= threshold`.
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub root: TreeNode,
    pub max_splits: usize,
    pub n_features: usize,
}

/// Weighted Gini impurity of a label multiset.
pub fn gini(weight_one: f64, weight_total: f64) -> f64 {
    if weight_total <= 0.0 {
        return 0.0;
    }
    let p1 = weight_one / weight_total;
    let p0 = 1.0 - p1;
    1.0 - p0 * p0 - p1 * p1
}

/// Best split of the rows at `indices`: `(feature, threshold, gain)` where
/// gain is the decrease in weight-normalized Gini impurity.
fn best_split(
    rows: &[Vec<f64>],
    labels: &[u8],
    weights: &[f64],
    indices: &[usize],
) -> Option<(usize, f64, f64)> {
    let dim = rows[indices[0]].len();
    let total_w: f64 = indices.iter().map(|&i| weights[i]).sum();
    let total_w1: f64 = indices
        .iter()
        .filter(|&&i| labels[i] == 1)
        .map(|&i| weights[i])
        .sum();
    if total_w <= 0.0 {
        return None;
    }
    let parent = gini(total_w1, total_w);
    let mut best: Option<(usize, f64, f64)> = None;

    let mut order: Vec<usize> = Vec::with_capacity(indices.len());
    for feature in 0..dim {
        order.clear();
        order.extend_from_slice(indices);
        order.sort_by(|&a, &b| {
            rows[a][feature]
                .total_cmp(&rows[b][feature])
                .then(a.cmp(&b))
        });
        let mut left_w = 0.0;
        let mut left_w1 = 0.0;
        for pair in 0..order.len() - 1 {
            let i = order[pair];
            left_w += weights[i];
            if labels[i] == 1 {
                left_w1 += weights[i];
            }
            let v_lo = rows[i][feature];
            let v_hi = rows[order[pair + 1]][feature];
            if v_lo == v_hi {
                continue;
            }
            let threshold = v_lo + (v_hi - v_lo) / 2.0;
            let right_w = total_w - left_w;
            let right_w1 = total_w1 - left_w1;
            let child =
                (left_w * gini(left_w1, left_w) + right_w * gini(right_w1, right_w)) / total_w;
            let gain = parent - child;
            let better = match best {
                None => gain > MIN_GAIN,
                Some((bf, bt, bg)) => {
                    gain > bg + MIN_GAIN
                        || ((gain - bg).abs() <= MIN_GAIN
                            && (feature < bf || (feature == bf && threshold < bt)))
                }
            };
            if better {
                best = Some((feature, threshold, gain));
            }
        }
    }
    best
}

fn make_leaf(labels: &[u8], weights: &[f64], indices: &[usize]) -> TreeNode {
    let total: f64 = indices.iter().map(|&i| weights[i]).sum();
    let ones: f64 = indices
        .iter()
        .filter(|&&i| labels[i] == 1)
        .map(|&i| weights[i])
        .sum();
    let prob_one = if total > 0.0 { ones / total } else { 0.0 };
    TreeNode::Leaf {
        label: u8::from(prob_one >= 0.5),
        prob_one,
    }
}

struct Frontier {
    indices: Vec<usize>,
    split: Option<(usize, f64, f64)>,
    created: usize,
    /// Path from the root: false = left child, true = right child.
    path: Vec<bool>,
}

/// Fit a tree on explicit rows/labels with optional sample weights.
pub fn fit_tree_rows(
    rows: &[Vec<f64>],
    labels: &[u8],
    weights: Option<&[f64]>,
    max_splits: usize,
) -> Result<TreeModel> {
    if rows.is_empty() {
        return Err(Error::InvalidDataset("empty training set".into()));
    }
    let n_features = rows[0].len();
    let uniform;
    let weights = match weights {
        Some(w) => {
            if w.len() != rows.len() {
                return Err(Error::Fit(format!(
                    "expected {} sample weights, got {}",
                    rows.len(),
                    w.len()
                )));
            }
            if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::Fit("sample weights must be non-negative".into()));
            }
            if w.iter().sum::<f64>() <= 0.0 {
                return Err(Error::Fit("sample weights must not all be zero".into()));
            }
            w
        }
        None => {
            uniform = vec![1.0; rows.len()];
            &uniform
        }
    };

    let all: Vec<usize> = (0..rows.len()).collect();
    let mut frontier = vec![Frontier {
        split: best_split(rows, labels, weights, &all),
        indices: all,
        created: 0,
        path: Vec::new(),
    }];
    let mut accepted: Vec<(Vec<bool>, usize, f64)> = Vec::new();
    let mut created = 1;

    while accepted.len() < max_splits {
        // Expand the frontier leaf with the largest gain.
        let pick = frontier
            .iter()
            .enumerate()
            .filter(|(_, f)| f.split.is_some())
            .max_by(|(_, a), (_, b)| {
                let ga = a.split.unwrap().2;
                let gb = b.split.unwrap().2;
                ga.total_cmp(&gb).then(b.created.cmp(&a.created))
            })
            .map(|(i, _)| i);
        let Some(pick) = pick else { break };
        let node = frontier.swap_remove(pick);
        let (feature, threshold, _) = node.split.unwrap();
        accepted.push((node.path.clone(), feature, threshold));
        let (left, right): (Vec<usize>, Vec<usize>) = node
            .indices
            .iter()
            .partition(|&&i| rows[i][feature] <= threshold);
        for (indices, side) in [(left, false), (right, true)] {
            let mut path = node.path.clone();
            path.push(side);
            frontier.push(Frontier {
                split: best_split(rows, labels, weights, &indices),
                indices,
                created,
                path,
            });
            created += 1;
        }
    }

    // Assemble the tree from accepted splits plus frontier leaves.
    fn build(
        path: &mut Vec<bool>,
        splits: &[(Vec<bool>, usize, f64)],
        leaves: &[Frontier],
        labels: &[u8],
        weights: &[f64],
    ) -> TreeNode {
        if let Some((_, feature, threshold)) = splits.iter().find(|(p, _, _)| p == path) {
            path.push(false);
            let left = build(path, splits, leaves, labels, weights);
            path.pop();
            path.push(true);
            let right = build(path, splits, leaves, labels, weights);
            path.pop();
            TreeNode::Split {
                feature: *feature,
                threshold: *threshold,
                left: Box::new(left),
                right: Box::new(right),
            }
        } else {
            let leaf = leaves
                .iter()
                .find(|f| &f.path == path)
                .expect("leaf for every unexpanded path");
            make_leaf(labels, weights, &leaf.indices)
        }
    }
    let root = build(&mut Vec::new(), &accepted, &frontier, labels, weights);
    Ok(TreeModel {
        root,
        max_splits,
        n_features,
    })
}

pub fn predict_tree(model: &TreeModel, x: &[f64]) -> Result<(u8, f64)> {
    check_dim(model.n_features, x.len())?;
    let mut node = &model.root;
    loop {
        match node {
            TreeNode::Leaf { label, prob_one } => return Ok((*label, *prob_one)),
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                node = if x[*feature] <= *threshold { left } else { right };
            }
        }
    }
}

impl TreeModel {
    pub fn predict(&self, x: &[f64]) -> Result<(u8, f64)> {
        predict_tree(self, x)
    }

    /// Number of internal nodes.
    pub fn n_splits(&self) -> usize {
        fn count(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + count(left) + count(right),
            }
        }
        count(&self.root)
    }

    /// The root split, if the tree is not a single leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match &self.root {
            TreeNode::Split {
                feature, threshold, ..
            } => Some((*feature, *threshold)),
            TreeNode::Leaf { .. } => None,
        }
    }
}
