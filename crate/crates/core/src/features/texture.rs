//! The five gray-level texture-matrix families and their 74 features.
//!
//! GLCM (24) and GLRLM (16) features are computed per direction over the 13
//! unique 3D offsets and averaged arithmetically; GLSZM (16), GLDM (13) and
//! NGTDM (5) use a single matrix built with 26-connectivity. Entropies use
//! log base 2 with the 0*log(0) = 0 convention.
//!
//! Degenerate guards (all documented in the shipped catalog): zero-variance
//! Correlation, Imc1, Imc2 and MCC are 0; a direction with no voxel pairs is
//! skipped in the average, and 0 is emitted if no direction has pairs;
//! NGTDM Coarseness of a flat region is 1e6.

use std::collections::BTreeMap;

use super::{FeatureError, FeatureVector, GrayLevelVolume};
use crate::linalg::symmetric_eigenvalues;

/// The 13 unique (up to sign) 26-neighborhood offsets.
pub const DIRECTIONS_13: [(i64, i64, i64); 13] = [
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (1, 1, 0),
    (1, -1, 0),
    (1, 0, 1),
    (1, 0, -1),
    (0, 1, 1),
    (0, 1, -1),
    (1, 1, 1),
    (1, 1, -1),
    (1, -1, 1),
    (1, -1, -1),
];

const OFFSETS_26: [(i64, i64, i64); 26] = make_offsets_26();

const fn make_offsets_26() -> [(i64, i64, i64); 26] {
    let mut out = [(0i64, 0i64, 0i64); 26];
    let mut n = 0;
    let mut dz = -1i64;
    while dz <= 1 {
        let mut dy = -1i64;
        while dy <= 1 {
            let mut dx = -1i64;
            while dx <= 1 {
                if !(dx == 0 && dy == 0 && dz == 0) {
                    out[n] = (dx, dy, dz);
                    n += 1;
                }
                dx += 1;
            }
            dy += 1;
        }
        dz += 1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextureKind {
    Glcm,
    Glrlm,
    Glszm,
    Gldm,
    Ngtdm,
}

/// Construction parameters. Defaults match the feature path: distance 1,
/// 13 symmetric directions, GLDM alpha 0, 26-connected zones/neighborhoods.
#[derive(Debug, Clone, Copy)]
pub struct TextureParams {
    pub gldm_alpha: u32,
}

impl Default for TextureParams {
    fn default() -> Self {
        Self { gldm_alpha: 0 }
    }
}

/// A texture matrix. For GLCM/GLRLM this is the sum over the 13 directions
/// of the per-direction (symmetrized, for GLCM) count matrices; NGTDM rows
/// are (n_i, s_i) per gray level.
#[derive(Debug, Clone)]
pub struct TextureMatrix {
    pub kind: TextureKind,
    pub values: Vec<Vec<f64>>,
}

#[inline]
fn level_at(g: &GrayLevelVolume, x: i64, y: i64, z: i64) -> u32 {
    let (nx, ny, nz) = g.dims;
    if x < 0 || y < 0 || z < 0 || x >= nx as i64 || y >= ny as i64 || z >= nz as i64 {
        return 0;
    }
    g.levels[x as usize + nx * (y as usize + ny * z as usize)]
}

/// Symmetrized unnormalized GLCM counts for one direction (distance 1).
pub fn glcm_matrix(g: &GrayLevelVolume, dir: (i64, i64, i64)) -> Vec<Vec<f64>> {
    let ng = g.ng as usize;
    let mut p = vec![vec![0.0; ng]; ng];
    let (nx, ny, nz) = g.dims;
    for z in 0..nz as i64 {
        for y in 0..ny as i64 {
            for x in 0..nx as i64 {
                let a = level_at(g, x, y, z);
                if a == 0 {
                    continue;
                }
                let b = level_at(g, x + dir.0, y + dir.1, z + dir.2);
                if b == 0 {
                    continue;
                }
                p[(a - 1) as usize][(b - 1) as usize] += 1.0;
                p[(b - 1) as usize][(a - 1) as usize] += 1.0;
            }
        }
    }
    p
}

/// Unnormalized GLRLM run counts for one direction: rows gray level, columns
/// run length 1..max.
pub fn glrlm_matrix(g: &GrayLevelVolume, dir: (i64, i64, i64)) -> Vec<Vec<f64>> {
    let ng = g.ng as usize;
    let (nx, ny, nz) = g.dims;
    let max_run = nx.max(ny).max(nz);
    let mut p = vec![vec![0.0; max_run]; ng];
    for z in 0..nz as i64 {
        for y in 0..ny as i64 {
            for x in 0..nx as i64 {
                let a = level_at(g, x, y, z);
                if a == 0 {
                    continue;
                }
                // run start: predecessor along dir differs
                if level_at(g, x - dir.0, y - dir.1, z - dir.2) == a {
                    continue;
                }
                let mut len = 1usize;
                let (mut cx, mut cy, mut cz) = (x + dir.0, y + dir.1, z + dir.2);
                while level_at(g, cx, cy, cz) == a {
                    len += 1;
                    cx += dir.0;
                    cy += dir.1;
                    cz += dir.2;
                }
                p[(a - 1) as usize][len - 1] += 1.0;
            }
        }
    }
    p
}

/// 26-connected equal-level zones as sparse (level, size) -> count.
fn glszm_zones(g: &GrayLevelVolume) -> BTreeMap<(u32, usize), f64> {
    let (nx, ny, nz) = g.dims;
    let n = nx * ny * nz;
    let mut seen = vec![false; n];
    let mut zones = BTreeMap::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] || g.levels[start] == 0 {
            continue;
        }
        let lvl = g.levels[start];
        seen[start] = true;
        stack.push(start);
        let mut size = 0usize;
        while let Some(i) = stack.pop() {
            size += 1;
            let x = (i % nx) as i64;
            let y = ((i / nx) % ny) as i64;
            let z = (i / (nx * ny)) as i64;
            for &(dx, dy, dz) in &OFFSETS_26 {
                let (px, py, pz) = (x + dx, y + dy, z + dz);
                if px < 0 || py < 0 || pz < 0 || px >= nx as i64 || py >= ny as i64 || pz >= nz as i64 {
                    continue;
                }
                let j = px as usize + nx * (py as usize + ny * pz as usize);
                if !seen[j] && g.levels[j] == lvl {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        *zones.entry((lvl, size)).or_insert(0.0) += 1.0;
    }
    zones
}

/// GLDM counts as sparse (level, dependence) -> count, dependence = 1 +
/// number of 26-neighbors within alpha of the center level.
fn gldm_counts(g: &GrayLevelVolume, alpha: u32) -> BTreeMap<(u32, usize), f64> {
    let (nx, ny, nz) = g.dims;
    let mut out = BTreeMap::new();
    for z in 0..nz as i64 {
        for y in 0..ny as i64 {
            for x in 0..nx as i64 {
                let a = level_at(g, x, y, z);
                if a == 0 {
                    continue;
                }
                let mut dep = 1usize;
                for &(dx, dy, dz) in &OFFSETS_26 {
                    let b = level_at(g, x + dx, y + dy, z + dz);
                    if b > 0 && (a as i64 - b as i64).unsigned_abs() as u32 <= alpha {
                        dep += 1;
                    }
                }
                *out.entry((a, dep)).or_insert(0.0) += 1.0;
            }
        }
    }
    out
}

/// NGTDM per-level (n_i, s_i): n_i counts ROI voxels of level i having at
/// least one in-ROI 26-neighbor; s_i sums |i - mean(valid neighbors)|.
fn ngtdm_arrays(g: &GrayLevelVolume) -> (Vec<f64>, Vec<f64>) {
    let ng = g.ng as usize;
    let (nx, ny, nz) = g.dims;
    let mut n = vec![0.0; ng];
    let mut s = vec![0.0; ng];
    for z in 0..nz as i64 {
        for y in 0..ny as i64 {
            for x in 0..nx as i64 {
                let a = level_at(g, x, y, z);
                if a == 0 {
                    continue;
                }
                let mut sum = 0.0;
                let mut cnt = 0usize;
                for &(dx, dy, dz) in &OFFSETS_26 {
                    let b = level_at(g, x + dx, y + dy, z + dz);
                    if b > 0 {
                        sum += b as f64;
                        cnt += 1;
                    }
                }
                if cnt == 0 {
                    continue;
                }
                n[(a - 1) as usize] += 1.0;
                s[(a - 1) as usize] += (a as f64 - sum / cnt as f64).abs();
            }
        }
    }
    (n, s)
}

/// One aggregated matrix per the spec's operation surface.
pub fn texture_matrix(
    kind: TextureKind,
    g: &GrayLevelVolume,
    params: TextureParams,
) -> Result<TextureMatrix, FeatureError> {
    let values = match kind {
        TextureKind::Glcm => {
            let ng = g.ng as usize;
            let mut acc = vec![vec![0.0; ng]; ng];
            for dir in DIRECTIONS_13 {
                let m = glcm_matrix(g, dir);
                for i in 0..ng {
                    for j in 0..ng {
                        acc[i][j] += m[i][j];
                    }
                }
            }
            acc
        }
        TextureKind::Glrlm => {
            let mut acc: Vec<Vec<f64>> = Vec::new();
            for dir in DIRECTIONS_13 {
                let m = glrlm_matrix(g, dir);
                if acc.is_empty() {
                    acc = m;
                } else {
                    for (ar, mr) in acc.iter_mut().zip(m) {
                        for (a, v) in ar.iter_mut().zip(mr) {
                            *a += v;
                        }
                    }
                }
            }
            acc
        }
        TextureKind::Glszm => {
            let zones = glszm_zones(g);
            let max_size = zones.keys().map(|&(_, s)| s).max().unwrap_or(1);
            let mut m = vec![vec![0.0; max_size]; g.ng as usize];
            for (&(lvl, size), &c) in &zones {
                m[(lvl - 1) as usize][size - 1] += c;
            }
            m
        }
        TextureKind::Gldm => {
            let counts = gldm_counts(g, params.gldm_alpha);
            let max_dep = counts.keys().map(|&(_, d)| d).max().unwrap_or(1);
            let mut m = vec![vec![0.0; max_dep]; g.ng as usize];
            for (&(lvl, dep), &c) in &counts {
                m[(lvl - 1) as usize][dep - 1] += c;
            }
            m
        }
        TextureKind::Ngtdm => {
            let (n, s) = ngtdm_arrays(g);
            n.into_iter().zip(s).map(|(a, b)| vec![a, b]).collect()
        }
    };
    Ok(TextureMatrix { kind, values })
}

fn xlog2(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

const GLCM_NAMES: [&str; 24] = [
    "Autocorrelation",
    "JointAverage",
    "ClusterProminence",
    "ClusterShade",
    "ClusterTendency",
    "Contrast",
    "Correlation",
    "DifferenceAverage",
    "DifferenceEntropy",
    "DifferenceVariance",
    "Id",
    "Idm",
    "Idmn",
    "Idn",
    "Imc1",
    "Imc2",
    "InverseVariance",
    "JointEnergy",
    "JointEntropy",
    "MaximumProbability",
    "Mcc",
    "SumAverage",
    "SumEntropy",
    "SumSquares",
];

/// The 24 GLCM features for one direction's symmetrized count matrix.
pub fn glcm_features_single(counts: &[Vec<f64>]) -> Option<[f64; 24]> {
    let ng = counts.len();
    let total: f64 = counts.iter().flatten().sum();
    if total <= 0.0 {
        return None;
    }
    let p: Vec<Vec<f64>> = counts
        .iter()
        .map(|r| r.iter().map(|&v| v / total).collect())
        .collect();
    let px: Vec<f64> = (0..ng).map(|i| p[i].iter().sum()).collect();
    let gray = |i: usize| (i + 1) as f64;
    let mu: f64 = (0..ng).map(|i| gray(i) * px[i]).sum();
    let sigma2: f64 = (0..ng).map(|i| (gray(i) - mu).powi(2) * px[i]).sum();

    let mut p_sum = vec![0.0; 2 * ng - 1]; // k = i+j in 2..2Ng -> index i+j-2
    let mut p_diff = vec![0.0; ng]; // k = |i-j| in 0..Ng-1
    for i in 0..ng {
        for j in 0..ng {
            p_sum[i + j] += p[i][j];
            p_diff[i.abs_diff(j)] += p[i][j];
        }
    }

    let autocorr: f64 = (0..ng)
        .map(|i| (0..ng).map(|j| gray(i) * gray(j) * p[i][j]).sum::<f64>())
        .sum();
    let contrast: f64 = (0..ng)
        .map(|i| (0..ng).map(|j| (gray(i) - gray(j)).powi(2) * p[i][j]).sum::<f64>())
        .sum();
    let cluster = |pow: i32| -> f64 {
        (0..ng)
            .map(|i| {
                (0..ng)
                    .map(|j| (gray(i) + gray(j) - 2.0 * mu).powi(pow) * p[i][j])
                    .sum::<f64>()
            })
            .sum()
    };
    let correlation = if sigma2 > 1e-12 {
        (autocorr - mu * mu) / sigma2
    } else {
        0.0
    };
    let da: f64 = (0..ng).map(|k| k as f64 * p_diff[k]).sum();
    let de: f64 = -p_diff.iter().map(|&v| xlog2(v)).sum::<f64>();
    let dv: f64 = (0..ng).map(|k| (k as f64 - da).powi(2) * p_diff[k]).sum();
    let sa: f64 = (0..p_sum.len()).map(|k| (k + 2) as f64 * p_sum[k]).sum();
    let se: f64 = -p_sum.iter().map(|&v| xlog2(v)).sum::<f64>();
    let id: f64 = (0..ng)
        .map(|i| (0..ng).map(|j| p[i][j] / (1.0 + i.abs_diff(j) as f64)).sum::<f64>())
        .sum();
    let idm: f64 = (0..ng)
        .map(|i| (0..ng).map(|j| p[i][j] / (1.0 + (i.abs_diff(j) as f64).powi(2))).sum::<f64>())
        .sum();
    let idn: f64 = (0..ng)
        .map(|i| {
            (0..ng)
                .map(|j| p[i][j] / (1.0 + i.abs_diff(j) as f64 / ng as f64))
                .sum::<f64>()
        })
        .sum();
    let idmn: f64 = (0..ng)
        .map(|i| {
            (0..ng)
                .map(|j| p[i][j] / (1.0 + (i.abs_diff(j) as f64 / ng as f64).powi(2)))
                .sum::<f64>()
        })
        .sum();
    let inv_var: f64 = (0..ng)
        .map(|i| {
            (0..ng)
                .filter(|&j| j != i)
                .map(|j| p[i][j] / (i.abs_diff(j) as f64).powi(2))
                .sum::<f64>()
        })
        .sum();
    let energy: f64 = p.iter().flatten().map(|&v| v * v).sum();
    let hxy: f64 = -p.iter().flatten().map(|&v| xlog2(v)).sum::<f64>();
    let hx: f64 = -px.iter().map(|&v| xlog2(v)).sum::<f64>();
    let mut hxy1 = 0.0;
    let mut hxy2 = 0.0;
    for i in 0..ng {
        for j in 0..ng {
            let q = px[i] * px[j];
            if q > 0.0 {
                if p[i][j] > 0.0 {
                    hxy1 -= p[i][j] * q.log2();
                }
                hxy2 -= q * q.log2();
            }
        }
    }
    let imc1 = if hx > 1e-12 { (hxy - hxy1) / hx } else { 0.0 };
    let imc2 = {
        let arg = 1.0 - (-2.0 * (hxy2 - hxy)).exp();
        if arg > 0.0 {
            arg.sqrt()
        } else {
            0.0
        }
    };
    let max_p = p.iter().flatten().cloned().fold(0.0f64, f64::max);
    let sum_squares: f64 = (0..ng)
        .map(|i| (0..ng).map(|j| (gray(i) - mu).powi(2) * p[i][j]).sum::<f64>())
        .sum();

    // MCC via the symmetric similarity of the Q matrix: eigenvalues of
    // B B^T with B[i][j] = p[i][j] / sqrt(px_i px_j), rows/cols with px > 0.
    let active: Vec<usize> = (0..ng).filter(|&i| px[i] > 0.0).collect();
    let mcc = if active.len() < 2 {
        0.0
    } else {
        let k = active.len();
        let mut b = vec![vec![0.0; k]; k];
        for (ai, &i) in active.iter().enumerate() {
            for (aj, &j) in active.iter().enumerate() {
                b[ai][aj] = p[i][j] / (px[i] * px[j]).sqrt();
            }
        }
        let mut m = vec![vec![0.0; k]; k];
        for r in 0..k {
            for c in 0..k {
                let mut s = 0.0;
                for t in 0..k {
                    s += b[r][t] * b[c][t];
                }
                m[r][c] = s;
            }
        }
        let eig = symmetric_eigenvalues(m);
        eig[1].clamp(0.0, 1.0).sqrt()
    };

    Some([
        autocorr,
        mu,
        cluster(4),
        cluster(3),
        cluster(2),
        contrast,
        correlation,
        da,
        de,
        dv,
        id,
        idm,
        idmn,
        idn,
        imc1,
        imc2,
        inv_var,
        energy,
        hxy,
        max_p,
        mcc,
        sa,
        se,
        sum_squares,
    ])
}

const GLRLM_NAMES: [&str; 16] = [
    "ShortRunEmphasis",
    "LongRunEmphasis",
    "GrayLevelNonUniformity",
    "GrayLevelNonUniformityNormalized",
    "RunLengthNonUniformity",
    "RunLengthNonUniformityNormalized",
    "RunPercentage",
    "GrayLevelVariance",
    "RunVariance",
    "RunEntropy",
    "LowGrayLevelRunEmphasis",
    "HighGrayLevelRunEmphasis",
    "ShortRunLowGrayLevelEmphasis",
    "ShortRunHighGrayLevelEmphasis",
    "LongRunLowGrayLevelEmphasis",
    "LongRunHighGrayLevelEmphasis",
];

// Shared 16-feature evaluator for run/zone style matrices given sparse
// ((gray level, length), count) entries and the ROI voxel count.
fn rl_style_features(entries: &[((f64, f64), f64)], np: f64) -> [f64; 16] {
    let nr: f64 = entries.iter().map(|&(_, c)| c).sum();
    if nr <= 0.0 {
        return [0.0; 16];
    }
    let mut by_level: BTreeMap<u64, f64> = BTreeMap::new();
    let mut by_len: BTreeMap<u64, f64> = BTreeMap::new();
    for &((i, j), c) in entries {
        *by_level.entry(i as u64).or_insert(0.0) += c;
        *by_len.entry(j as u64).or_insert(0.0) += c;
    }
    let s = |f: &dyn Fn(f64, f64) -> f64| -> f64 {
        entries.iter().map(|&((i, j), c)| f(i, j) * c).sum::<f64>() / nr
    };
    let sre = s(&|_, j| 1.0 / (j * j));
    let lre = s(&|_, j| j * j);
    let gln: f64 = by_level.values().map(|&v| v * v).sum::<f64>() / nr;
    let rln: f64 = by_len.values().map(|&v| v * v).sum::<f64>() / nr;
    let mu_i = s(&|i, _| i);
    let glv = s(&|i, _| (i - mu_i) * (i - mu_i));
    let mu_j = s(&|_, j| j);
    let rv = s(&|_, j| (j - mu_j) * (j - mu_j));
    let re: f64 = -entries.iter().map(|&(_, c)| xlog2(c / nr)).sum::<f64>();
    [
        sre,
        lre,
        gln,
        gln / nr,
        rln,
        rln / nr,
        nr / np,
        glv,
        rv,
        re,
        s(&|i, _| 1.0 / (i * i)),
        s(&|i, _| i * i),
        s(&|i, j| 1.0 / (i * i * j * j)),
        s(&|i, j| i * i / (j * j)),
        s(&|i, j| j * j / (i * i)),
        s(&|i, j| i * i * j * j),
    ]
}

fn dense_to_entries(m: &[Vec<f64>]) -> Vec<((f64, f64), f64)> {
    let mut out = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0.0 {
                out.push((((i + 1) as f64, (j + 1) as f64), c));
            }
        }
    }
    out
}

const GLSZM_NAMES: [&str; 16] = [
    "SmallAreaEmphasis",
    "LargeAreaEmphasis",
    "GrayLevelNonUniformity",
    "GrayLevelNonUniformityNormalized",
    "SizeZoneNonUniformity",
    "SizeZoneNonUniformityNormalized",
    "ZonePercentage",
    "GrayLevelVariance",
    "ZoneVariance",
    "ZoneEntropy",
    "LowGrayLevelZoneEmphasis",
    "HighGrayLevelZoneEmphasis",
    "SmallAreaLowGrayLevelEmphasis",
    "SmallAreaHighGrayLevelEmphasis",
    "LargeAreaLowGrayLevelEmphasis",
    "LargeAreaHighGrayLevelEmphasis",
];

const GLDM_NAMES: [&str; 13] = [
    "SmallDependenceEmphasis",
    "LargeDependenceEmphasis",
    "GrayLevelNonUniformity",
    "DependenceNonUniformityNormalized",
    "GrayLevelVariance",
    "DependenceVariance",
    "DependenceEntropy",
    "LowGrayLevelEmphasis",
    "HighGrayLevelEmphasis",
    "SmallDependenceLowGrayLevelEmphasis",
    "SmallDependenceHighGrayLevelEmphasis",
    "LargeDependenceLowGrayLevelEmphasis",
    "LargeDependenceHighGrayLevelEmphasis",
];

const NGTDM_NAMES: [&str; 5] = ["Coarseness", "Contrast", "Busyness", "Complexity", "Strength"];

fn ngtdm_features(n: &[f64], s: &[f64]) -> [f64; 5] {
    let nvp: f64 = n.iter().sum();
    if nvp <= 0.0 {
        return [0.0; 5];
    }
    let ng = n.len();
    let p: Vec<f64> = n.iter().map(|&v| v / nvp).collect();
    let active: Vec<usize> = (0..ng).filter(|&i| p[i] > 0.0).collect();
    let ngp = active.len() as f64;
    let gray = |i: usize| (i + 1) as f64;

    let psum: f64 = (0..ng).map(|i| p[i] * s[i]).sum();
    let coarseness = if psum > 0.0 { 1.0 / psum } else { 1e6 };

    let mut pair_contrast = 0.0;
    let mut busy_den = 0.0;
    let mut complexity_sum = 0.0;
    let mut strength_sum = 0.0;
    for &i in &active {
        for &j in &active {
            let dg = gray(i) - gray(j);
            pair_contrast += p[i] * p[j] * dg * dg;
            busy_den += (gray(i) * p[i] - gray(j) * p[j]).abs();
            complexity_sum += dg.abs() * (p[i] * s[i] + p[j] * s[j]) / (p[i] + p[j]);
            strength_sum += (p[i] + p[j]) * dg * dg;
        }
    }

    let ssum: f64 = s.iter().sum();
    let contrast = if ngp > 1.0 {
        pair_contrast / (ngp * (ngp - 1.0)) * ssum / nvp
    } else {
        0.0
    };
    let busyness = if busy_den > 0.0 { psum / busy_den } else { 0.0 };
    let complexity = complexity_sum / nvp;
    let strength = if ssum > 0.0 { strength_sum / ssum } else { 0.0 };

    [coarseness, contrast, busyness, complexity, strength]
}

/// Average per-direction features, skipping directions without pairs.
fn average_directional<const N: usize>(
    per_dir: impl Iterator<Item = Option<[f64; N]>>,
) -> [f64; N] {
    let mut acc = [0.0; N];
    let mut count = 0usize;
    for feats in per_dir.flatten() {
        for (a, f) in acc.iter_mut().zip(feats) {
            *a += f;
        }
        count += 1;
    }
    if count > 0 {
        for a in acc.iter_mut() {
            *a /= count as f64;
        }
    }
    acc
}

pub fn texture_ids() -> Vec<String> {
    let mut ids = Vec::with_capacity(74);
    ids.extend(GLCM_NAMES.iter().map(|n| format!("glcm_{n}")));
    ids.extend(GLRLM_NAMES.iter().map(|n| format!("glrlm_{n}")));
    ids.extend(GLSZM_NAMES.iter().map(|n| format!("glszm_{n}")));
    ids.extend(GLDM_NAMES.iter().map(|n| format!("gldm_{n}")));
    ids.extend(NGTDM_NAMES.iter().map(|n| format!("ngtdm_{n}")));
    ids
}

/// All 74 texture features of a discretized ROI.
pub fn texture_features(g: &GrayLevelVolume) -> FeatureVector {
    let np = g.roi_voxel_count() as f64;
    let mut out = FeatureVector::new();

    let glcm = average_directional(
        DIRECTIONS_13
            .iter()
            .map(|&d| glcm_features_single(&glcm_matrix(g, d))),
    );
    for (name, v) in GLCM_NAMES.iter().zip(glcm) {
        out.push(format!("glcm_{name}"), v);
    }

    let glrlm = average_directional(DIRECTIONS_13.iter().map(|&d| {
        let m = glrlm_matrix(g, d);
        Some(rl_style_features(&dense_to_entries(&m), np))
    }));
    for (name, v) in GLRLM_NAMES.iter().zip(glrlm) {
        out.push(format!("glrlm_{name}"), v);
    }

    let zones = glszm_zones(g);
    let entries: Vec<((f64, f64), f64)> = zones
        .iter()
        .map(|(&(l, s), &c)| (((l as f64), (s as f64)), c))
        .collect();
    for (name, v) in GLSZM_NAMES.iter().zip(rl_style_features(&entries, np)) {
        out.push(format!("glszm_{name}"), v);
    }

    let deps = gldm_counts(g, 0);
    let entries: Vec<((f64, f64), f64)> = deps
        .iter()
        .map(|(&(l, d), &c)| (((l as f64), (d as f64)), c))
        .collect();
    let all16 = rl_style_features(&entries, np);
    // map the shared evaluator's outputs onto the 13 published GLDM features
    // (DependenceNonUniformity at index 4 is the size-bearing one we drop,
    // and RunPercentage is meaningless here since every voxel has exactly
    // one dependence -> replaced by DependenceVariance/Entropy computed below)
    let dep_mu: f64 = entries.iter().map(|&((_, d), c)| d * c).sum::<f64>() / np.max(1.0);
    let dep_var: f64 = entries
        .iter()
        .map(|&((_, d), c)| (d - dep_mu) * (d - dep_mu) * c)
        .sum::<f64>()
        / np.max(1.0);
    let dep_entropy: f64 = -entries
        .iter()
        .map(|&(_, c)| xlog2(c / np.max(1.0)))
        .sum::<f64>();
    let gldm_vals = [
        all16[0],          // SmallDependenceEmphasis
        all16[1],          // LargeDependenceEmphasis
        all16[2],          // GrayLevelNonUniformity
        all16[5],          // DependenceNonUniformityNormalized
        all16[7],          // GrayLevelVariance
        dep_var,           // DependenceVariance
        dep_entropy,       // DependenceEntropy
        all16[10],         // LowGrayLevelEmphasis
        all16[11],         // HighGrayLevelEmphasis
        all16[12],
        all16[13],
        all16[14],
        all16[15],
    ];
    for (name, v) in GLDM_NAMES.iter().zip(gldm_vals) {
        out.push(format!("gldm_{name}"), v);
    }

    let (n, s) = ngtdm_arrays(g);
    for (name, v) in NGTDM_NAMES.iter().zip(ngtdm_features(&n, &s)) {
        out.push(format!("ngtdm_{name}"), v);
    }
    debug_assert_eq!(out.len(), 74);
    out
}
