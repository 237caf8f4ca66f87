//! The 93-feature per-ROI radiomics catalog: 3 shape, 16 first-order, and
//! 74 texture features over five gray-level matrix families.
//!
//! Size-bearing descriptors (volumes, surface area, axis lengths, 2D/3D
//! diameters, Energy, TotalEnergy, GLDM DependenceNonUniformity) are
//! deliberately absent: the prediction target is a size change, so the
//! catalog keeps only size-free features. See `catalog.txt` at the repo
//! root for the published ordering.

mod discretize;
mod firstorder;
mod shape;
mod texture;

pub use discretize::{discretize, GrayLevelVolume};
pub use firstorder::first_order_features;
pub use shape::{shape_features, shape_features_guarded};
pub use texture::{
    texture_features, texture_matrix, TextureKind, TextureMatrix, TextureParams, DIRECTIONS_13,
};

use thiserror::Error;

use crate::volume::{BinaryMask, ScalarVolume};

/// Default discretization bin width in HU.
pub const DEFAULT_BIN_WIDTH: f64 = 25.0;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("ROI is empty")]
    EmptyRoi,
    #[error("ROI and volume geometry mismatch")]
    GeometryMismatch,
    #[error("bin width must be positive: {0}")]
    NonPositiveBinWidth(f64),
    #[error("degenerate geometry: ROI is collinear or coplanar")]
    DegenerateGeometry,
    #[error("unknown texture matrix kind")]
    UnknownKind,
}

/// Ordered (feature id, value) pairs with unique ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector {
    entries: Vec<(String, f64)>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, id: impl Into<String>, value: f64) {
        let id = id.into();
        debug_assert!(
            !self.entries.iter().any(|(k, _)| *k == id),
            "duplicate feature id {id}"
        );
        self.entries.push((id, value));
    }

    pub fn extend(&mut self, other: FeatureVector) {
        for (id, v) in other.entries {
            self.push(id, v);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == id).map(|(_, v)| *v)
    }
}

/// The full 93-entry block for one ROI: shape(3) ++ first-order(16) ++
/// texture(74), fixed order.
pub fn roi_feature_block(
    v: &ScalarVolume,
    roi: &BinaryMask,
    bin_width: f64,
) -> Result<FeatureVector, FeatureError> {
    if !roi.matches_volume(v) {
        return Err(FeatureError::GeometryMismatch);
    }
    if roi.is_mask_empty() {
        return Err(FeatureError::EmptyRoi);
    }
    let mut out = shape_features_guarded(roi);
    out.extend(first_order_features(v, roi)?);
    let g = discretize(v, roi, bin_width)?;
    out.extend(texture_features(&g));
    debug_assert_eq!(out.len(), 93);
    Ok(out)
}

/// Ids of the full per-ROI catalog, in emission order.
pub fn catalog_ids() -> Vec<String> {
    let mut ids: Vec<String> = shape::SHAPE_IDS.iter().map(|s| s.to_string()).collect();
    ids.extend(firstorder::FIRST_ORDER_IDS.iter().map(|s| s.to_string()));
    ids.extend(texture::texture_ids());
    ids
}
