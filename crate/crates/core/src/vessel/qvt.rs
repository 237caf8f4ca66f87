//! Quantitative vascular tree measures and box-counting fractal slopes.

use crate::features::FeatureVector;
use crate::stats::four_moments;
use crate::vessel::graph::{Branch, SkeletonGraph};
use crate::vessel::VesselError;
use crate::volume::BinaryMask;

const MEASURES: [&str; 8] = [
    "Tortuosity",
    "CurvMean",
    "CurvMax",
    "CurvStd",
    "TotalCurv",
    "GeodesicLen",
    "ChordLen",
    "VoxelCount",
];
const STATS: [&str; 4] = ["Mean", "Std", "Skew", "Kurt"];

/// The 34 vascular feature ids, in output order.
pub static QVT_IDS: [&str; 34] = [
    "qvt_Tortuosity_Mean",
    "qvt_Tortuosity_Std",
    "qvt_Tortuosity_Skew",
    "qvt_Tortuosity_Kurt",
    "qvt_CurvMean_Mean",
    "qvt_CurvMean_Std",
    "qvt_CurvMean_Skew",
    "qvt_CurvMean_Kurt",
    "qvt_CurvMax_Mean",
    "qvt_CurvMax_Std",
    "qvt_CurvMax_Skew",
    "qvt_CurvMax_Kurt",
    "qvt_CurvStd_Mean",
    "qvt_CurvStd_Std",
    "qvt_CurvStd_Skew",
    "qvt_CurvStd_Kurt",
    "qvt_TotalCurv_Mean",
    "qvt_TotalCurv_Std",
    "qvt_TotalCurv_Skew",
    "qvt_TotalCurv_Kurt",
    "qvt_GeodesicLen_Mean",
    "qvt_GeodesicLen_Std",
    "qvt_GeodesicLen_Skew",
    "qvt_GeodesicLen_Kurt",
    "qvt_ChordLen_Mean",
    "qvt_ChordLen_Std",
    "qvt_ChordLen_Skew",
    "qvt_ChordLen_Kurt",
    "qvt_VoxelCount_Mean",
    "qvt_VoxelCount_Std",
    "qvt_VoxelCount_Skew",
    "qvt_VoxelCount_Kurt",
    "qvt_BranchCount",
    "qvt_FillFraction",
];

pub static FRACTAL_IDS: [&str; 10] = [
    "fractal_FD_r2",
    "fractal_FD_r4",
    "fractal_FD_r8",
    "fractal_FD_r16",
    "fractal_FD_r32",
    "fractal_FD_r64",
    "fractal_FD_r128",
    "fractal_FD_r256",
    "fractal_FD_r512",
    "fractal_FD_r1024",
];

fn dist(a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2) + (a.2 - b.2).powi(2)).sqrt()
}

/// geodesic length / chord length; always >= 1 up to discretization.
pub fn branch_tortuosity(branch: &Branch) -> Result<f64, VesselError> {
    if branch.chord_mm <= f64::EPSILON {
        return Err(VesselError::ZeroChord);
    }
    Ok(branch.geodesic_mm / branch.chord_mm)
}

/// Pointwise Menger curvature (1/mm) over triples (i-w, i, i+w).
/// Paths shorter than 2w+1 points yield an empty profile.
pub fn curvature_profile(branch: &Branch, window: usize) -> Vec<f64> {
    let p = &branch.path_mm;
    let w = window;
    if p.len() < 2 * w + 1 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(p.len() - 2 * w);
    for i in w..p.len() - w {
        let (a, b, c) = (p[i - w], p[i], p[i + w]);
        let la = dist(a, b);
        let lb = dist(b, c);
        let lc = dist(a, c);
        if la <= f64::EPSILON || lb <= f64::EPSILON || lc <= f64::EPSILON {
            out.push(0.0);
            continue;
        }
        // 2 * area via cross product of (b-a) x (c-a)
        let u = (b.0 - a.0, b.1 - a.1, b.2 - a.2);
        let v = (c.0 - a.0, c.1 - a.1, c.2 - a.2);
        let cx = u.1 * v.2 - u.2 * v.1;
        let cy = u.2 * v.0 - u.0 * v.2;
        let cz = u.0 * v.1 - u.1 * v.0;
        let area2 = (cx * cx + cy * cy + cz * cz).sqrt();
        out.push(2.0 * area2 / (la * lb * lc));
    }
    out
}

const CURV_WINDOW: usize = 2;

/// 34 vascular features: four moments over branches of eight per-branch
/// measures, plus branch count and skeleton fill fraction of the vessel
/// bounding box. Empty graphs yield all zeros.
pub fn qvt_features(graph: &SkeletonGraph, vessels: &BinaryMask) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let branches = &graph.branches;

    let mut per_measure: [Vec<f64>; 8] = Default::default();
    for b in branches {
        if let Ok(t) = branch_tortuosity(b) {
            per_measure[0].push(t);
        }
        let prof = curvature_profile(b, CURV_WINDOW);
        let (cmean, cmax, cstd, total) = if prof.is_empty() {
            (0.0, 0.0, 0.0, 0.0)
        } else {
            let [m, s, _, _] = four_moments(&prof);
            let mx = prof.iter().cloned().fold(f64::MIN, f64::max);
            let ds = b.geodesic_mm / (b.path_mm.len() - 1) as f64;
            let total: f64 = prof.iter().map(|k| k * ds).sum();
            (m, mx, s, total)
        };
        per_measure[1].push(cmean);
        per_measure[2].push(cmax);
        per_measure[3].push(cstd);
        per_measure[4].push(total);
        per_measure[5].push(b.geodesic_mm);
        per_measure[6].push(b.chord_mm);
        per_measure[7].push(b.voxel_count() as f64);
    }

    for (mi, m) in MEASURES.iter().enumerate() {
        let stats = four_moments(&per_measure[mi]);
        for (si, s) in STATS.iter().enumerate() {
            fv.push(format!("qvt_{m}_{s}"), stats[si]);
        }
    }
    fv.push("qvt_BranchCount", branches.len() as f64);
    fv.push("qvt_FillFraction", fill_fraction(vessels));
    fv
}

fn fill_fraction(vessels: &BinaryMask) -> f64 {
    let mut lo = (usize::MAX, usize::MAX, usize::MAX);
    let mut hi = (0usize, 0usize, 0usize);
    let mut n = 0usize;
    for (x, y, z) in vessels.foreground() {
        lo = (lo.0.min(x), lo.1.min(y), lo.2.min(z));
        hi = (hi.0.max(x), hi.1.max(y), hi.2.max(z));
        n += 1;
    }
    if n == 0 {
        return 0.0;
    }
    let bbox = (hi.0 - lo.0 + 1) * (hi.1 - lo.1 + 1) * (hi.2 - lo.2 + 1);
    n as f64 / bbox as f64
}

/// Box-counting slopes. Boxes of side r = 2^k voxels anchored at the grid
/// origin; fd for scale 2^k is log2(N(2^{k-1}) / N(2^k)), k = 1..10.
pub fn fractal_dimensions(mask: &BinaryMask) -> FeatureVector {
    let mut counts = [0u64; 11];
    if mask.count() > 0 {
        for (k, c) in counts.iter_mut().enumerate() {
            let r = 1usize << k;
            let mut boxes: std::collections::BTreeSet<(usize, usize, usize)> =
                std::collections::BTreeSet::new();
            for (x, y, z) in mask.foreground() {
                boxes.insert((x / r, y / r, z / r));
            }
            *c = boxes.len() as u64;
        }
    }
    let mut fv = FeatureVector::new();
    for k in 1..=10 {
        let fd = if counts[k] == 0 {
            0.0
        } else {
            (counts[k - 1] as f64 / counts[k] as f64).log2()
        };
        fv.push(FRACTAL_IDS[k - 1], fd);
    }
    fv
}
