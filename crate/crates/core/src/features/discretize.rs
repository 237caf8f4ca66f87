//! Fixed-bin-width gray-level discretization.

use super::FeatureError;
use crate::volume::{BinaryMask, ScalarVolume};

/// Discretized intensities: 0 outside the ROI, 1..Ng inside.
#[derive(Debug, Clone)]
pub struct GrayLevelVolume {
    pub dims: (usize, usize, usize),
    pub spacing: (f64, f64, f64),
    pub levels: Vec<u32>,
    pub ng: u32,
    pub bin_width: f64,
    pub roi_min: f64,
}

impl GrayLevelVolume {
    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims.0 * (y + self.dims.1 * z)
    }

    #[inline]
    pub fn level(&self, x: usize, y: usize, z: usize) -> u32 {
        self.levels[self.index(x, y, z)]
    }

    pub fn roi_voxel_count(&self) -> usize {
        self.levels.iter().filter(|&&l| l > 0).count()
    }
}

/// level = floor((x - roi_min) / bin_width) + 1, over ROI voxels only.
pub fn discretize(
    v: &ScalarVolume,
    roi: &BinaryMask,
    bin_width: f64,
) -> Result<GrayLevelVolume, FeatureError> {
    if bin_width <= 0.0 {
        return Err(FeatureError::NonPositiveBinWidth(bin_width));
    }
    if !roi.matches_volume(v) {
        return Err(FeatureError::GeometryMismatch);
    }
    if roi.is_mask_empty() {
        return Err(FeatureError::EmptyRoi);
    }
    let roi_min = v
        .data
        .iter()
        .zip(&roi.data)
        .filter(|(_, &b)| b)
        .map(|(&x, _)| x)
        .fold(f64::INFINITY, f64::min);
    let mut ng = 0u32;
    let levels: Vec<u32> = v
        .data
        .iter()
        .zip(&roi.data)
        .map(|(&x, &b)| {
            if b {
                let l = ((x - roi_min) / bin_width).floor() as u32 + 1;
                ng = ng.max(l);
                l
            } else {
                0
            }
        })
        .collect();
    Ok(GrayLevelVolume {
        dims: v.dims,
        spacing: v.spacing,
        levels,
        ng,
        bin_width,
        roi_min,
    })
}
