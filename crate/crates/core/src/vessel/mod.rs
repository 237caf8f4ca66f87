//! Vessel analysis: lung masking, vessel segmentation, lesion-attached tree
//! retention, skeletonization, branch decomposition, QVT statistics, and
//! box-counting fractal dimensions.

mod graph;
mod qvt;
mod skeleton;

pub use graph::{branch_decompose, Branch, NodeKind, SkeletonGraph};
pub use qvt::{
    branch_tortuosity, curvature_profile, fractal_dimensions, qvt_features, FRACTAL_IDS, QVT_IDS,
};
pub use skeleton::skeletonize;

use thiserror::Error;

use crate::roi::{connected_components, dilate_mask, distance_map, Connectivity};
use crate::volume::{BinaryMask, ScalarVolume};

#[derive(Debug, Error)]
pub enum VesselError {
    #[error("no lung candidate component found")]
    NoLungFound,
    #[error("lung mask is empty")]
    EmptyLung,
    #[error("branch chord is zero (closed loop)")]
    ZeroChord,
}

/// Vessel threshold selection.
#[derive(Debug, Clone, Copy)]
pub enum VesselThreshold {
    Otsu,
    Fixed(f64),
}

const LUNG_AIR_THRESHOLD_HU: f64 = -320.0;

/// Threshold-based lung extraction: keep sub-threshold voxels, drop
/// components touching the volume border (outside air), keep the two
/// largest remaining components, then close with a 2-voxel radius.
pub fn lung_mask_threshold(v: &ScalarVolume) -> Result<BinaryMask, VesselError> {
    let mut low = BinaryMask::like(v);
    for (i, &x) in v.data.iter().enumerate() {
        low.data[i] = x < LUNG_AIR_THRESHOLD_HU;
    }
    let comps = connected_components(&low, Connectivity::TwentySix);
    let (nx, ny, nz) = v.dims;
    let mut touches_border = vec![false; comps.count() + 1];
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                if x == 0 || y == 0 || z == 0 || x + 1 == nx || y + 1 == ny || z + 1 == nz {
                    let l = comps.labels[low.index(x, y, z)];
                    if l > 0 {
                        touches_border[l as usize] = true;
                    }
                }
            }
        }
    }
    let mut keep: Vec<(usize, u32)> = (1..=comps.count() as u32)
        .filter(|&l| !touches_border[l as usize])
        .map(|l| (comps.sizes[(l - 1) as usize], l))
        .collect();
    if keep.is_empty() {
        return Err(VesselError::NoLungFound);
    }
    keep.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    keep.truncate(2);
    let kept: Vec<u32> = keep.iter().map(|&(_, l)| l).collect();
    let mut lung = BinaryMask::like(v);
    for (i, &l) in comps.labels.iter().enumerate() {
        if l > 0 && kept.contains(&l) {
            lung.data[i] = true;
        }
    }
    // morphological closing, 2-voxel radius
    let radius = 2.0 * v.spacing.0.max(v.spacing.1).max(v.spacing.2);
    let dilated = dilate_mask(&lung, radius).expect("nonempty lung");
    let mut inverted = dilated.clone();
    for b in inverted.data.iter_mut() {
        *b = !*b;
    }
    let closed = if inverted.is_mask_empty() {
        dilated
    } else {
        let d = distance_map(&inverted).expect("nonempty complement");
        let mut m = dilated;
        for (i, &dist) in d.iter().enumerate() {
            m.data[i] = dist > radius + 1e-9;
        }
        m
    };
    Ok(closed)
}

/// Threshold vessels inside the lung; Otsu over in-lung intensities or a
/// fixed HU cut. Result is a subset of the lung mask.
pub fn segment_vessels(
    v: &ScalarVolume,
    lung: &BinaryMask,
    mode: VesselThreshold,
) -> Result<BinaryMask, VesselError> {
    if lung.is_mask_empty() {
        return Err(VesselError::EmptyLung);
    }
    let threshold = match mode {
        VesselThreshold::Fixed(t) => Some(t),
        VesselThreshold::Otsu => {
            let xs: Vec<f64> = v
                .data
                .iter()
                .zip(&lung.data)
                .filter(|(_, &b)| b)
                .map(|(&x, _)| x)
                .collect();
            otsu_threshold(&xs)
        }
    };
    let mut out = BinaryMask::like(v);
    if let Some(t) = threshold {
        for (i, (&x, &b)) in v.data.iter().zip(&lung.data).enumerate() {
            out.data[i] = b && x >= t;
        }
    }
    Ok(out)
}

// Otsu over a 256-bin histogram; None when inter-class variance is 0
// (uniform input -> declare no vessels).
fn otsu_threshold(xs: &[f64]) -> Option<f64> {
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return None;
    }
    const NBINS: usize = 256;
    let width = (hi - lo) / NBINS as f64;
    let mut hist = [0usize; NBINS];
    for &x in xs {
        let b = (((x - lo) / width) as usize).min(NBINS - 1);
        hist[b] += 1;
    }
    let total = xs.len() as f64;
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();
    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    let mut best = (0.0f64, None::<usize>);
    for t in 0..NBINS - 1 {
        w0 += hist[t] as f64;
        if w0 == 0.0 {
            continue;
        }
        let w1 = total - w0;
        if w1 == 0.0 {
            break;
        }
        sum0 += t as f64 * hist[t] as f64;
        let mu0 = sum0 / w0;
        let mu1 = (sum_all - sum0) / w1;
        let between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if between > best.0 {
            best = (between, Some(t));
        }
    }
    best.1.map(|t| lo + (t as f64 + 1.0) * width)
}

/// Keep 26-connected vessel components with a voxel inside or 26-adjacent to
/// the lesion; lesion voxels themselves are excluded from the output.
pub fn lesion_attached_tree(vessels: &BinaryMask, lesion: &BinaryMask) -> BinaryMask {
    let comps = connected_components(vessels, Connectivity::TwentySix);
    let (nx, ny, nz) = vessels.dims;
    let mut attached = vec![false; comps.count() + 1];
    for z in 0..nz as i64 {
        for y in 0..ny as i64 {
            for x in 0..nx as i64 {
                let i = x as usize + nx * (y as usize + ny * z as usize);
                let l = comps.labels[i];
                if l == 0 || attached[l as usize] {
                    continue;
                }
                'probe: for dz in -1i64..=1 {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            let (px, py, pz) = (x + dx, y + dy, z + dz);
                            if px < 0
                                || py < 0
                                || pz < 0
                                || px >= nx as i64
                                || py >= ny as i64
                                || pz >= nz as i64
                            {
                                continue;
                            }
                            if lesion.get(px as usize, py as usize, pz as usize) {
                                attached[l as usize] = true;
                                break 'probe;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut out = BinaryMask::empty(vessels.dims, vessels.spacing, vessels.origin);
    for (i, &l) in comps.labels.iter().enumerate() {
        if l > 0 && attached[l as usize] && !lesion.data[i] {
            out.data[i] = true;
        }
    }
    out
}
