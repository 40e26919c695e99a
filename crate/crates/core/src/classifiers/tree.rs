//! Binary decision tree with axis-aligned splits chosen by Gini impurity
//! decrease, grown best-first under a split budget.
//!
//! Candidate thresholds are the midpoints between consecutive distinct
//! sorted values of each feature. Growth stops at pure nodes, zero gain, or
//! the budget; since each tree under budget k is a prefix of the tree under
//! budget k+1, training accuracy is non-decreasing in the budget.

use super::{check_rows_labels, ClassifierError};
use crate::signal::ActivityLabel;

pub const DEFAULT_MAX_SPLITS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        /// Training rows per class code at this node.
        counts: [usize; 6],
        prediction: ActivityLabel,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Child for rows with `row[feature] < threshold`.
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    pub nodes: Vec<TreeNode>,
    pub split_count: usize,
}

/// Gini diversity index of a class-count histogram: `1 - sum p_k^2`.
pub fn gini(counts: &[usize; 6]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t) * (c as f64 / t)).sum::<f64>()
}

fn modal_class(counts: &[usize; 6]) -> ActivityLabel {
    let code = (0..6).max_by_key(|&c| (counts[c], std::cmp::Reverse(c))).unwrap();
    ActivityLabel::from_code(code).unwrap()
}

fn class_counts(labels: &[ActivityLabel], members: &[usize]) -> [usize; 6] {
    let mut counts = [0usize; 6];
    for &i in members {
        counts[labels[i].code()] += 1;
    }
    counts
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

/// Best Gini-gain split of the member rows; `None` when no split gains.
fn best_split(rows: &[Vec<f64>], labels: &[ActivityLabel], members: &[usize]) -> Option<BestSplit> {
    let parent_counts = class_counts(labels, members);
    let parent_gini = gini(&parent_counts);
    if parent_gini == 0.0 {
        return None;
    }
    let n = members.len() as f64;
    let dim = rows[0].len();
    let mut best: Option<(f64, usize, f64)> = None; // (gain, feature, threshold)
    let mut ordered = members.to_vec();
    for feature in 0..dim {
        ordered.sort_by(|&a, &b| {
            rows[a][feature].partial_cmp(&rows[b][feature]).unwrap().then(a.cmp(&b))
        });
        let mut left_counts = [0usize; 6];
        let mut right_counts = parent_counts;
        for w in 0..ordered.len() - 1 {
            let i = ordered[w];
            left_counts[labels[i].code()] += 1;
            right_counts[labels[i].code()] -= 1;
            let (v, next) = (rows[i][feature], rows[ordered[w + 1]][feature]);
            if v == next {
                continue;
            }
            let n_left = (w + 1) as f64;
            let n_right = n - n_left;
            let gain = parent_gini
                - (n_left * gini(&left_counts) + n_right * gini(&right_counts)) / n;
            let threshold = v + (next - v) / 2.0;
            // Strictly-greater keeps the lowest feature and threshold on ties.
            if gain > best.map_or(0.0, |(g, _, _)| g) + 1e-15 {
                best = Some((gain, feature, threshold));
            }
        }
    }
    let (gain, feature, threshold) = best?;
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for &i in members {
        if rows[i][feature] < threshold {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    Some(BestSplit { feature, threshold, gain, left, right })
}

pub fn train_tree(
    rows: &[Vec<f64>],
    labels: &[ActivityLabel],
    max_splits: usize,
) -> Result<TreeModel, ClassifierError> {
    check_rows_labels(rows, labels)?;
    let mut nodes = vec![TreeNode::Leaf {
        counts: class_counts(labels, &(0..rows.len()).collect::<Vec<_>>()),
        prediction: modal_class(&class_counts(labels, &(0..rows.len()).collect::<Vec<_>>())),
    }];
    // Frontier of splittable leaves: (gain, creation order, node id, split).
    let mut frontier: Vec<(f64, usize, usize, BestSplit)> = Vec::new();
    if let Some(split) = best_split(rows, labels, &(0..rows.len()).collect::<Vec<_>>()) {
        frontier.push((split.gain, 0, 0, split));
    }
    let mut split_count = 0;
    while split_count < max_splits && !frontier.is_empty() {
        // Best-first: largest gain, oldest node on ties.
        let pick = frontier
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| {
                a.0.partial_cmp(&b.0).unwrap().then(b.1.cmp(&a.1))
            })
            .map(|(i, _)| i)
            .unwrap();
        let (_, _, node_id, split) = frontier.swap_remove(pick);

        let left_counts = class_counts(labels, &split.left);
        let right_counts = class_counts(labels, &split.right);
        let left_id = nodes.len();
        nodes.push(TreeNode::Leaf { counts: left_counts, prediction: modal_class(&left_counts) });
        let right_id = nodes.len();
        nodes.push(TreeNode::Leaf { counts: right_counts, prediction: modal_class(&right_counts) });
        nodes[node_id] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: left_id,
            right: right_id,
        };
        split_count += 1;
        if let Some(s) = best_split(rows, labels, &split.left) {
            frontier.push((s.gain, left_id, left_id, s));
        }
        if let Some(s) = best_split(rows, labels, &split.right) {
            frontier.push((s.gain, right_id, right_id, s));
        }
    }
    Ok(TreeModel { nodes, split_count })
}

impl TreeModel {
    pub fn predict(&self, row: &[f64]) -> ActivityLabel {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { prediction, .. } => return *prediction,
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if row[*feature] < *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn training_accuracy(&self, rows: &[Vec<f64>], labels: &[ActivityLabel]) -> f64 {
        let hits = rows
            .iter()
            .zip(labels)
            .filter(|(row, &label)| self.predict(row) == label)
            .count();
        hits as f64 / rows.len() as f64
    }
}
