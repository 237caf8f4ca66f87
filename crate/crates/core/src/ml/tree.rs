//! Axis-aligned CART used by both ensembles.
//!
//! Splits are chosen deterministically: among equal-gain candidates the
//! lowest feature index wins, then the lowest threshold. Thresholds are
//! midpoints between adjacent distinct values.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Node {
    Leaf { value: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0usize;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return *value,
                Node::Split { feature, threshold, left, right } => {
                    i = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

/// Split quality criterion over the target values at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Gini impurity on binary targets (values must be 0 or 1).
    Gini,
    /// Variance (mean squared error) for regression targets.
    Variance,
}

fn node_impurity(criterion: Criterion, sum: f64, sum_sq: f64, n: f64) -> f64 {
    match criterion {
        Criterion::Gini => {
            let p = sum / n;
            2.0 * p * (1.0 - p)
        }
        Criterion::Variance => sum_sq / n - (sum / n).powi(2),
    }
}

pub struct GrowParams<'a> {
    pub criterion: Criterion,
    pub min_leaf: usize,
    /// None = unlimited depth (grow to purity).
    pub max_depth: Option<usize>,
    /// Candidate feature indices per node; None = all features.
    pub feature_sample: Option<&'a mut dyn FnMut() -> Vec<usize>>,
    /// Leaf output from the member target values.
    pub leaf_value: &'a dyn Fn(&[f64]) -> f64,
}

struct Builder<'a, 'b> {
    rows: &'a [Vec<f64>],
    targets: &'a [f64],
    params: &'a mut GrowParams<'b>,
    nodes: Vec<Node>,
    /// impurity-decrease sums per feature, weighted by node size
    importance: Vec<f64>,
    n_root: f64,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl<'a, 'b> Builder<'a, 'b> {
    fn leaf(&mut self, samples: &[usize]) -> usize {
        let tv: Vec<f64> = samples.iter().map(|&i| self.targets[i]).collect();
        let value = (self.params.leaf_value)(&tv);
        self.nodes.push(Node::Leaf { value });
        self.nodes.len() - 1
    }

    fn best_split(&mut self, samples: &[usize]) -> Option<BestSplit> {
        let n = samples.len() as f64;
        let sum: f64 = samples.iter().map(|&i| self.targets[i]).sum();
        let sum_sq: f64 = samples.iter().map(|&i| self.targets[i].powi(2)).sum();
        let imp = node_impurity(self.params.criterion, sum, sum_sq, n);
        if imp <= 1e-15 {
            return None;
        }

        let candidates: Vec<usize> = match &mut self.params.feature_sample {
            Some(f) => f(),
            None => (0..self.rows[0].len()).collect(),
        };
        let min_leaf = self.params.min_leaf;

        let mut best: Option<BestSplit> = None;
        let mut order: Vec<usize> = samples.to_vec();
        for feat in candidates {
            order.sort_by(|&a, &b| {
                self.rows[a][feat]
                    .partial_cmp(&self.rows[b][feat])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let mut lsum = 0.0;
            let mut lsq = 0.0;
            for (k, &i) in order.iter().enumerate().take(order.len() - 1) {
                let t = self.targets[i];
                lsum += t;
                lsq += t * t;
                let nl = k + 1;
                let nr = order.len() - nl;
                let v = self.rows[i][feat];
                let v_next = self.rows[order[k + 1]][feat];
                if v_next <= v || nl < min_leaf || nr < min_leaf {
                    continue;
                }
                let imp_l = node_impurity(self.params.criterion, lsum, lsq, nl as f64);
                let imp_r =
                    node_impurity(self.params.criterion, sum - lsum, sum_sq - lsq, nr as f64);
                let gain = imp - (nl as f64 * imp_l + nr as f64 * imp_r) / n;
                let better = match &best {
                    None => gain > 1e-15,
                    Some(b) => gain > b.gain + 1e-15,
                };
                if better {
                    best = Some(BestSplit { feature: feat, threshold: (v + v_next) / 2.0, gain });
                }
            }
        }
        best
    }

    fn grow(&mut self, samples: &[usize], depth: usize) -> usize {
        let depth_ok = self.params.max_depth.map_or(true, |d| depth < d);
        if !depth_ok || samples.len() < 2 * self.params.min_leaf {
            return self.leaf(samples);
        }
        let Some(split) = self.best_split(samples) else {
            return self.leaf(samples);
        };
        let (ls, rs): (Vec<usize>, Vec<usize>) = samples
            .iter()
            .partition(|&&i| self.rows[i][split.feature] <= split.threshold);
        self.importance[split.feature] += samples.len() as f64 / self.n_root * split.gain;

        let idx = self.nodes.len();
        self.nodes.push(Node::Leaf { value: 0.0 }); // placeholder
        let left = self.grow(&ls, depth + 1);
        let right = self.grow(&rs, depth + 1);
        self.nodes[idx] =
            Node::Split { feature: split.feature, threshold: split.threshold, left, right };
        idx
    }
}

/// Grow one tree on the given sample indices. Returns the tree and its
/// per-feature impurity-decrease totals.
pub fn grow_tree(
    rows: &[Vec<f64>],
    targets: &[f64],
    samples: &[usize],
    params: &mut GrowParams,
) -> (Tree, Vec<f64>) {
    let n_features = rows[0].len();
    let mut b = Builder {
        rows,
        targets,
        params,
        nodes: Vec::new(),
        importance: vec![0.0; n_features],
        n_root: samples.len() as f64,
    };
    b.grow(samples, 0);
    (Tree { nodes: b.nodes }, b.importance)
}

pub fn mean_leaf(tv: &[f64]) -> f64 {
    tv.iter().sum::<f64>() / tv.len() as f64
}
