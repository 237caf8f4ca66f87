//! Group-aware k-fold cross-validation.
//!
//! Folds are built over groups (patients), not samples, so correlated
//! lesions from one patient never appear on both sides of a split.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ensemble::{train_gradient_boosting, train_random_forest, GbParams, RfParams};
use super::metrics::roc_auc;
use super::{Dataset, MlError, ModelKind};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub auc: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvReport {
    pub model: ModelKind,
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<FoldResult>,
    pub mean_auc: f64,
    /// population standard deviation over fold AUCs
    pub std_auc: f64,
    /// held-out scores for every sample, in dataset order
    pub oof_scores: Vec<f64>,
}

/// Assign groups to k folds, stratified by the group's majority label:
/// shuffle each class's groups with the seed, then deal them round-robin
/// so every fold sees both classes.
fn group_folds(data: &Dataset, k: usize, seed: u64) -> Vec<usize> {
    let mut groups: Vec<&str> = Vec::new();
    for g in &data.groups {
        if !groups.contains(&g.as_str()) {
            groups.push(g);
        }
    }
    let majority_positive = |g: &str| {
        let mut pos = 0i64;
        for (gi, &l) in data.groups.iter().zip(&data.labels) {
            if gi == g {
                pos += if l { 1 } else { -1 };
            }
        }
        pos > 0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of: std::collections::HashMap<&str, usize> = Default::default();
    for class in [false, true] {
        let mut cls: Vec<&str> =
            groups.iter().copied().filter(|g| majority_positive(g) == class).collect();
        cls.shuffle(&mut rng);
        for (i, g) in cls.into_iter().enumerate() {
            fold_of.insert(g, i % k);
        }
    }
    data.groups.iter().map(|g| fold_of[g.as_str()]).collect()
}

pub fn kfold_cv(
    data: &Dataset,
    model: ModelKind,
    k: usize,
    seed: u64,
    rf: &RfParams,
    gb: &GbParams,
) -> Result<CvReport, MlError> {
    if data.rows.is_empty() {
        return Err(MlError::EmptyDataset);
    }
    let fold_of = group_folds(data, k, seed);
    let mut folds = Vec::with_capacity(k);
    let mut oof_scores = vec![f64::NAN; data.n_samples()];

    for fold in 0..k {
        let train_idx: Vec<usize> =
            (0..data.n_samples()).filter(|&i| fold_of[i] != fold).collect();
        let test_idx: Vec<usize> =
            (0..data.n_samples()).filter(|&i| fold_of[i] == fold).collect();
        if test_idx.is_empty() {
            continue;
        }
        let train = data.subset(&train_idx);
        let model_fit = match model {
            ModelKind::RandomForest => train_random_forest(&train, rf)?,
            ModelKind::GradientBoosting => train_gradient_boosting(&train, gb)?,
        };
        let test_rows: Vec<Vec<f64>> = test_idx.iter().map(|&i| data.rows[i].clone()).collect();
        let scores = model_fit.predict_proba(&test_rows)?;
        let labels: Vec<bool> = test_idx.iter().map(|&i| data.labels[i]).collect();
        let auc = roc_auc(&scores, &labels)?;
        for (&i, &s) in test_idx.iter().zip(&scores) {
            oof_scores[i] = s;
        }
        folds.push(FoldResult {
            fold,
            n_train: train_idx.len(),
            n_test: test_idx.len(),
            auc,
        });
    }

    let aucs: Vec<f64> = folds.iter().map(|f| f.auc).collect();
    let mean_auc = crate::stats::mean(&aucs);
    let std_auc = crate::stats::std_dev(&aucs);
    Ok(CvReport { model, k, seed, folds, mean_auc, std_auc, oof_scores })
}
