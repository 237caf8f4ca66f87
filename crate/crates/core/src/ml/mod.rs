//! Deterministic tree-ensemble classifiers and evaluation.
//!
//! Both learners are built on the same axis-aligned CART routine
//! ([`tree`]); all randomness flows from caller-supplied seeds through
//! ChaCha streams, so training is bit-reproducible across runs and
//! platforms. Model files are versioned JSON.

mod cv;
mod ensemble;
mod metrics;
mod tree;

pub use cv::{kfold_cv, CvReport, FoldResult};
pub use ensemble::{
    train_gradient_boosting, train_random_forest, GbParams, Model, ModelKind, RfParams,
};
pub use metrics::{roc_auc, roc_points, RocPoint};
pub use tree::Tree;

use std::path::Path;

use thiserror::Error;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum MlError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset needs both classes present")]
    SingleClass,
    #[error("row {row} has {got} features, expected {expected}")]
    RowWidth { row: usize, got: usize, expected: usize },
    #[error("labels/groups length does not match row count")]
    LengthMismatch,
    #[error("model file is corrupt: {0}")]
    CorruptModelFile(String),
    #[error("model format version {found} unsupported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("model expects {expected} features, got {got}")]
    FeatureCountMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Feature matrix with binary labels and a grouping key per sample
/// (samples sharing a group never straddle a CV train/test split).
#[derive(Debug, Clone)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
    pub groups: Vec<String>,
}

impl Dataset {
    pub fn new(
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Vec<bool>,
        groups: Vec<String>,
    ) -> Result<Self, MlError> {
        if rows.is_empty() {
            return Err(MlError::EmptyDataset);
        }
        if labels.len() != rows.len() || groups.len() != rows.len() {
            return Err(MlError::LengthMismatch);
        }
        let expected = feature_names.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != expected {
                return Err(MlError::RowWidth { row, got: r.len(), expected });
            }
        }
        Ok(Self { feature_names, rows, labels, groups })
    }

    pub fn n_samples(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Subset by sample indices; groups and labels follow.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            groups: idx.iter().map(|&i| self.groups[i].clone()).collect(),
        }
    }
}

pub fn save_model(model: &Model, path: &Path) -> Result<(), MlError> {
    let json = serde_json::to_string_pretty(model)
        .map_err(|e| MlError::CorruptModelFile(e.to_string()))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<Model, MlError> {
    let text = std::fs::read_to_string(path)?;
    let model: Model =
        serde_json::from_str(&text).map_err(|e| MlError::CorruptModelFile(e.to_string()))?;
    if model.format_version != MODEL_FORMAT_VERSION {
        return Err(MlError::VersionMismatch {
            found: model.format_version,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    Ok(model)
}
