//! Random forest and gradient-boosted trees over the shared CART.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{grow_tree, mean_leaf, Criterion, GrowParams, Tree};
use super::{Dataset, MlError, MODEL_FORMAT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    RandomForest,
    GradientBoosting,
}

/// Trained ensemble. RF averages leaf class fractions; GB applies the
/// logistic link to `init_score + learning_rate * sum(tree outputs)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Model {
    pub format_version: u32,
    pub kind: ModelKind,
    pub feature_names: Vec<String>,
    pub trees: Vec<Tree>,
    pub init_score: f64,
    pub learning_rate: f64,
    /// normalized impurity-decrease importance, parallel to feature_names
    pub importance: Vec<f64>,
}

impl Model {
    pub fn predict_proba(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>, MlError> {
        let p = self.feature_names.len();
        for r in rows {
            if r.len() != p {
                return Err(MlError::FeatureCountMismatch { expected: p, got: r.len() });
            }
        }
        Ok(rows.iter().map(|r| self.predict_row(r)).collect())
    }

    fn predict_row(&self, row: &[f64]) -> f64 {
        match self.kind {
            ModelKind::RandomForest => {
                let s: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
                s / self.trees.len() as f64
            }
            ModelKind::GradientBoosting => {
                let s: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
                sigmoid(self.init_score + self.learning_rate * s)
            }
        }
    }

    /// (name, importance) sorted descending, ties broken by feature order.
    pub fn ranked_importance(&self) -> Vec<(String, f64)> {
        let mut idx: Vec<usize> = (0..self.importance.len()).collect();
        idx.sort_by(|&a, &b| {
            self.importance[b]
                .partial_cmp(&self.importance[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        idx.into_iter()
            .map(|i| (self.feature_names[i].clone(), self.importance[i]))
            .collect()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn normalize(mut imp: Vec<f64>) -> Vec<f64> {
    let total: f64 = imp.iter().sum();
    if total > 0.0 {
        for v in &mut imp {
            *v /= total;
        }
    }
    imp
}

fn check_dataset(data: &Dataset) -> Result<(), MlError> {
    if data.rows.is_empty() {
        return Err(MlError::EmptyDataset);
    }
    let pos = data.labels.iter().filter(|&&l| l).count();
    if pos == 0 || pos == data.labels.len() {
        return Err(MlError::SingleClass);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct RfParams {
    pub n_trees: usize,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for RfParams {
    fn default() -> Self {
        Self { n_trees: 300, min_leaf: 2, seed: 0 }
    }
}

/// Bagged forest: per-tree bootstrap of samples, ceil(sqrt(p)) candidate
/// features per node, Gini splits grown to purity.
pub fn train_random_forest(data: &Dataset, params: &RfParams) -> Result<Model, MlError> {
    check_dataset(data)?;
    let n = data.n_samples();
    let p = data.n_features();
    let mtry = (p as f64).sqrt().ceil() as usize;
    let targets: Vec<f64> = data.labels.iter().map(|&l| l as u8 as f64).collect();

    let mut trees = Vec::with_capacity(params.n_trees);
    let mut importance = vec![0.0; p];
    for t in 0..params.n_trees {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_mul(0x9e3779b97f4a7c15) ^ t as u64);
        let samples: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let mut sampler = || -> Vec<usize> {
            // partial Fisher-Yates over feature indices
            let mut idx: Vec<usize> = (0..p).collect();
            for i in 0..mtry.min(p) {
                let j = rng.gen_range(i..p);
                idx.swap(i, j);
            }
            idx.truncate(mtry.min(p));
            idx.sort_unstable();
            idx
        };
        let mut gp = GrowParams {
            criterion: Criterion::Gini,
            min_leaf: params.min_leaf,
            max_depth: None,
            feature_sample: Some(&mut sampler),
            leaf_value: &mean_leaf,
        };
        let (tree, imp) = grow_tree(&data.rows, &targets, &samples, &mut gp);
        for (a, b) in importance.iter_mut().zip(imp) {
            *a += b;
        }
        trees.push(tree);
    }

    Ok(Model {
        format_version: MODEL_FORMAT_VERSION,
        kind: ModelKind::RandomForest,
        feature_names: data.feature_names.clone(),
        trees,
        init_score: 0.0,
        learning_rate: 0.0,
        importance: normalize(importance),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct GbParams {
    pub n_stages: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for GbParams {
    fn default() -> Self {
        Self { n_stages: 200, max_depth: 3, learning_rate: 0.1, min_leaf: 2, seed: 0 }
    }
}

/// Logistic-loss boosting: depth-limited variance-split trees fit to the
/// gradient residual, Newton leaf values. The seed is kept for interface
/// symmetry; fitting itself is deterministic.
pub fn train_gradient_boosting(data: &Dataset, params: &GbParams) -> Result<Model, MlError> {
    check_dataset(data)?;
    let n = data.n_samples();
    let y: Vec<f64> = data.labels.iter().map(|&l| l as u8 as f64).collect();
    let pos: f64 = y.iter().sum();
    let init_score = (pos / (n as f64 - pos)).ln();

    let mut score = vec![init_score; n];
    let mut trees = Vec::with_capacity(params.n_stages);
    let mut importance = vec![0.0; data.n_features()];

    for _ in 0..params.n_stages {
        let prob: Vec<f64> = score.iter().map(|&s| sigmoid(s)).collect();
        let residual: Vec<f64> = (0..n).map(|i| y[i] - prob[i]).collect();
        let (tree, imp) = fit_stage(data, &residual, &prob, params);
        for (a, b) in importance.iter_mut().zip(imp) {
            *a += b;
        }
        for (i, s) in score.iter_mut().enumerate() {
            *s += params.learning_rate * tree.predict_row(&data.rows[i]);
        }
        trees.push(tree);
    }

    Ok(Model {
        format_version: MODEL_FORMAT_VERSION,
        kind: ModelKind::GradientBoosting,
        feature_names: data.feature_names.clone(),
        trees,
        init_score,
        learning_rate: params.learning_rate,
        importance: normalize(importance),
    })
}

/// Grow one boosting stage on the residuals, then replace each leaf's
/// mean-residual value with the Newton step for logistic loss.
fn fit_stage(
    data: &Dataset,
    residual: &[f64],
    prob: &[f64],
    params: &GbParams,
) -> (Tree, Vec<f64>) {
    let samples: Vec<usize> = (0..data.n_samples()).collect();
    let mut gp = GrowParams {
        criterion: Criterion::Variance,
        min_leaf: params.min_leaf,
        max_depth: Some(params.max_depth),
        feature_sample: None,
        leaf_value: &mean_leaf,
    };
    let (mut tree, imp) = grow_tree(&data.rows, residual, &samples, &mut gp);

    // group samples by leaf and apply the Newton update
    let mut num = vec![0.0; tree.nodes.len()];
    let mut den = vec![0.0; tree.nodes.len()];
    for i in 0..data.n_samples() {
        let leaf = leaf_index(&tree, &data.rows[i]);
        num[leaf] += residual[i];
        den[leaf] += prob[i] * (1.0 - prob[i]);
    }
    for (li, node) in tree.nodes.iter_mut().enumerate() {
        if let super::tree::Node::Leaf { value } = node {
            *value = if den[li] > 1e-12 {
                (num[li] / den[li]).clamp(-4.0, 4.0)
            } else {
                0.0
            };
        }
    }
    (tree, imp)
}

fn leaf_index(tree: &Tree, row: &[f64]) -> usize {
    let mut i = 0usize;
    loop {
        match &tree.nodes[i] {
            super::tree::Node::Leaf { .. } => return i,
            super::tree::Node::Split { feature, threshold, left, right } => {
                i = if row[*feature] <= *threshold { *left } else { *right };
            }
        }
    }
}
