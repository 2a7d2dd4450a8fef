//! CART decision trees and a bagged random forest.
//!
//! Trees split on `x <= threshold`, with candidate thresholds at midpoints
//! between consecutive distinct values of a feature and the split chosen by
//! minimum size-weighted child Gini impurity. At each node `max_features`
//! features are drawn without replacement; the node becomes a leaf when it
//! is pure, too small for two `min_leaf` children, at `max_depth`, or when no
//! drawn feature offers a split that lowers impurity.
//!
//! Tree `k` of a forest draws its bootstrap sample and feature subsets from
//! its own stream keyed by `seed::derive`, so trees can be grown in any order
//! or concurrently and the model is the same.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::model::Mode;
use crate::seed;

/// Improvements smaller than this are treated as no improvement.
const MIN_GAIN: f64 = 1e-12;

/// A labeled training or evaluation row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub features: Vec<f64>,
    pub label: Mode,
}

impl From<&FeatureVector> for Row {
    fn from(fv: &FeatureVector) -> Self {
        Row { features: fv.values().to_vec(), label: fv.label }
    }
}

pub fn rows_from_features(features: &[FeatureVector]) -> Vec<Row> {
    features.iter().map(Row::from).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_features: usize,
    pub min_leaf: usize,
    /// `None` grows until another stopping rule applies.
    pub max_depth: Option<usize>,
    /// Bootstrap sample of the training-set size per tree.
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            // ceil(sqrt(N_FEATURES))
            max_features: 4,
            min_leaf: 1,
            max_depth: None,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidParameter("n_trees must be at least 1".into()));
        }
        if self.max_features == 0 || self.max_features > n_features {
            return Err(Error::InvalidParameter(format!(
                "max_features {} must lie in 1..={n_features}",
                self.max_features
            )));
        }
        if self.min_leaf == 0 {
            return Err(Error::InvalidParameter("min_leaf must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "node", rename_all = "lowercase"))]
pub enum TreeNode {
    Split {
        feature_index: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        class_counts: BTreeMap<Mode, u32>,
        prediction: Mode,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64]) -> Mode {
        let mut node = self;
        loop {
            match node {
                TreeNode::Split { feature_index, threshold, left, right } => {
                    node = if x[*feature_index] <= *threshold { left } else { right };
                }
                TreeNode::Leaf { prediction, .. } => return *prediction,
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
            TreeNode::Leaf { .. } => 0,
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
            TreeNode::Leaf { .. } => 1,
        }
    }

    /// Highest feature index referenced by any split.
    fn max_feature_index(&self) -> Option<usize> {
        match self {
            TreeNode::Split { feature_index, left, right, .. } => {
                Some(*feature_index).max(left.max_feature_index()).max(right.max_feature_index())
            }
            TreeNode::Leaf { .. } => None,
        }
    }
}

/// Gini impurity `1 - Σ p_c²` of a label multiset.
pub fn gini(labels: &[Mode]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyInput("gini labels"));
    }
    let mut counts: BTreeMap<Mode, u32> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let counts: Vec<u32> = counts.into_values().collect();
    Ok(gini_of_counts(&counts, labels.len() as u32))
}

fn gini_of_counts(counts: &[u32], total: u32) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n) * (c as f64 / n)).sum::<f64>()
}

/// Sorted distinct labels of `rows`.
pub fn class_order(rows: &[Row]) -> Vec<Mode> {
    let mut labels: Vec<Mode> = rows.iter().map(|r| r.label).collect();
    labels.sort();
    labels.dedup();
    labels
}

/// Index of the largest count, earliest (lexicographically smallest label) on ties.
fn argmax(counts: &[u32]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

fn check_rows(rows: &[Row]) -> Result<usize> {
    let first = rows.first().ok_or(Error::EmptyInput("training rows"))?;
    let width = first.features.len();
    if width == 0 {
        return Err(Error::InvalidParameter("rows have no features".into()));
    }
    if let Some(r) = rows.iter().find(|r| r.features.len() != width) {
        return Err(Error::InvalidParameter(format!(
            "row with {} features in a {width}-feature training set",
            r.features.len()
        )));
    }
    if rows.iter().any(|r| r.features.iter().any(|v| !v.is_finite())) {
        return Err(Error::InvalidParameter("training rows contain non-finite values".into()));
    }
    Ok(width)
}

struct Grower<'a> {
    rows: &'a [Row],
    classes: &'a [Mode],
    /// Class index of every row.
    class_of: Vec<usize>,
    params: &'a ForestParams,
    n_features: usize,
    rng: ChaCha8Rng,
}

struct BestSplit {
    score: f64,
    feature: usize,
    threshold: f64,
}

impl Grower<'_> {
    fn counts(&self, sample: &[usize]) -> Vec<u32> {
        let mut counts = alloc::vec![0u32; self.classes.len()];
        for &i in sample {
            counts[self.class_of[i]] += 1;
        }
        counts
    }

    fn leaf(&self, counts: &[u32]) -> TreeNode {
        let class_counts =
            self.classes.iter().zip(counts).filter(|(_, &c)| c > 0).map(|(&m, &c)| (m, c)).collect();
        TreeNode::Leaf { class_counts, prediction: self.classes[argmax(counts)] }
    }

    fn draw_features(&mut self) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..self.n_features).collect();
        for i in 0..self.params.max_features {
            let j = self.rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        pool.truncate(self.params.max_features);
        pool
    }

    fn best_split_on(&self, sample: &mut [usize], feature: usize, best: &mut Option<BestSplit>) {
        let rows = self.rows;
        sample.sort_by(|&a, &b| rows[a].features[feature].total_cmp(&rows[b].features[feature]));
        let n = sample.len();
        let min_leaf = self.params.min_leaf;
        let mut left = alloc::vec![0u32; self.classes.len()];
        let mut right = self.counts(sample);
        for p in 0..n - 1 {
            let c = self.class_of[sample[p]];
            left[c] += 1;
            right[c] -= 1;
            let (lo, hi) = (rows[sample[p]].features[feature], rows[sample[p + 1]].features[feature]);
            let n_left = p + 1;
            if lo == hi || n_left < min_leaf || n - n_left < min_leaf {
                continue;
            }
            let n_right = n - n_left;
            let score = (n_left as f64 * gini_of_counts(&left, n_left as u32)
                + n_right as f64 * gini_of_counts(&right, n_right as u32))
                / n as f64;
            if best.as_ref().is_none_or(|b| score < b.score) {
                let mid = lo + (hi - lo) / 2.0;
                // adjacent floats can round the midpoint onto the upper value
                let threshold = if mid < hi { mid } else { lo };
                *best = Some(BestSplit { score, feature, threshold });
            }
        }
    }

    fn grow(&mut self, sample: &mut [usize], depth: usize) -> TreeNode {
        let counts = self.counts(sample);
        let n = sample.len();
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_reached = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || n < 2 * self.params.min_leaf || depth_reached {
            return self.leaf(&counts);
        }
        let parent = gini_of_counts(&counts, n as u32);
        let mut best = None;
        for feature in self.draw_features() {
            self.best_split_on(sample, feature, &mut best);
        }
        let Some(split) = best.filter(|b| parent - b.score > MIN_GAIN) else {
            return self.leaf(&counts);
        };
        let (feature, threshold) = (split.feature, split.threshold);
        // order inside a node never affects the chosen split, only the partition matters
        let rows = self.rows;
        sample.sort_by(|&a, &b| rows[a].features[feature].total_cmp(&rows[b].features[feature]).then(a.cmp(&b)));
        let cut = sample.partition_point(|&i| rows[i].features[feature] <= threshold);
        let (l, r) = sample.split_at_mut(cut);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        TreeNode::Split { feature_index: feature, threshold, left: Box::new(left), right: Box::new(right) }
    }
}

fn grow_tree(
    rows: &[Row],
    classes: &[Mode],
    sample: &mut [usize],
    params: &ForestParams,
    rng: ChaCha8Rng,
) -> Result<TreeNode> {
    let n_features = check_rows(rows)?;
    params.validate(n_features)?;
    let class_of = rows
        .iter()
        .map(|r| {
            classes
                .binary_search(&r.label)
                .map_err(|_| Error::InvalidParameter(format!("label {} missing from class order", r.label)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut grower = Grower { rows, classes, class_of, params, n_features, rng };
    Ok(grower.grow(sample, 0))
}

/// Grows one tree on all of `rows` (no bootstrap).
pub fn train_tree(rows: &[Row], params: &ForestParams, seed: u64) -> Result<TreeNode> {
    let classes = class_order(rows);
    let mut sample: Vec<usize> = (0..rows.len()).collect();
    grow_tree(rows, &classes, &mut sample, params, seed::rng(seed))
}

/// Seed of tree `k` under `master_seed`.
pub fn tree_seed(master_seed: u64, k: usize) -> u64 {
    seed::derive(seed::tagged(master_seed, seed::stream::TREE), k as u64)
}

/// Grows tree `k` of the forest keyed by `master_seed`.
pub fn train_forest_tree(rows: &[Row], params: &ForestParams, master_seed: u64, k: usize) -> Result<TreeNode> {
    let classes = class_order(rows);
    let mut rng = seed::rng(tree_seed(master_seed, k));
    let n = rows.len();
    let mut sample: Vec<usize> = if params.bootstrap {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    grow_tree(rows, &classes, &mut sample, params, rng)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForestModel {
    pub params: ForestParams,
    pub master_seed: u64,
    pub class_order: Vec<Mode>,
    pub n_features: usize,
    pub trees: Vec<TreeNode>,
}

impl ForestModel {
    /// Assembles a model from trees grown by [`train_forest_tree`] in index order.
    pub fn from_trees(rows: &[Row], params: ForestParams, master_seed: u64, trees: Vec<TreeNode>) -> Result<Self> {
        let n_features = check_rows(rows)?;
        let model = ForestModel { params, master_seed, class_order: class_order(rows), n_features, trees };
        model.validate()?;
        Ok(model)
    }

    /// Structural checks for models loaded from outside.
    pub fn validate(&self) -> Result<()> {
        self.params.validate(self.n_features)?;
        if self.trees.len() != self.params.n_trees {
            return Err(Error::InvalidParameter(format!(
                "model has {} trees but n_trees is {}",
                self.trees.len(),
                self.params.n_trees
            )));
        }
        if self.class_order.is_empty() || self.class_order.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("class order must be sorted and non-empty".into()));
        }
        if self.trees.iter().any(|t| t.max_feature_index().is_some_and(|f| f >= self.n_features)) {
            return Err(Error::InvalidParameter("split references a feature out of range".into()));
        }
        Ok(())
    }

    pub fn tree_votes(&self, x: &[f64]) -> BTreeMap<Mode, usize> {
        let mut votes = BTreeMap::new();
        for tree in &self.trees {
            *votes.entry(tree.predict(x)).or_default() += 1;
        }
        votes
    }

    /// Majority vote; ties go to the lexicographically smallest label.
    pub fn predict(&self, x: &[f64]) -> Mode {
        majority(&self.tree_votes(x))
    }

    pub fn predict_features(&self, fv: &FeatureVector) -> Mode {
        self.predict(&fv.values())
    }
}

/// Label with most votes, smallest label among equals.
pub fn majority(votes: &BTreeMap<Mode, usize>) -> Mode {
    let mut best: Option<(Mode, usize)> = None;
    for (&m, &c) in votes {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((m, c));
        }
    }
    best.map(|(m, _)| m).unwrap_or(Mode::Unknown)
}

/// Sequential forest training. Identical to growing each tree with
/// [`train_forest_tree`] in any order and calling [`ForestModel::from_trees`].
pub fn train_forest(rows: &[Row], params: &ForestParams, master_seed: u64) -> Result<ForestModel> {
    let n_features = check_rows(rows)?;
    params.validate(n_features)?;
    let trees = (0..params.n_trees)
        .map(|k| train_forest_tree(rows, params, master_seed, k))
        .collect::<Result<Vec<_>>>()?;
    ForestModel::from_trees(rows, *params, master_seed, trees)
}
