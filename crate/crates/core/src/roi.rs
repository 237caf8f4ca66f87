//! Mask morphology and geometry: exact Euclidean distance maps, metric
//! dilation, the outer boundary band, connected components, RECIST
//! diameters, and shrinkage labels.

use thiserror::Error;

use crate::volume::BinaryMask;

#[derive(Debug, Error)]
pub enum RoiError {
    #[error("distance map of an empty mask is undefined")]
    EmptyMask,
    #[error("negative dilation margin: {0}")]
    NegativeMargin(f64),
    #[error("boundary band requires a nonempty lesion mask")]
    EmptyLesion,
    #[error("shrinkage label requires at least one follow-up")]
    NoFollowups,
    #[error("baseline diameter must be positive")]
    ZeroBaselineDiameter,
}

/// Voxel connectivity for component labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Six,
    Eighteen,
    TwentySix,
}

impl Connectivity {
    pub fn offsets(self) -> Vec<(i64, i64, i64)> {
        let mut out = Vec::new();
        for dz in -1i64..=1 {
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    let manhattan = dx.abs() + dy.abs() + dz.abs();
                    let keep = match self {
                        Connectivity::Six => manhattan == 1,
                        Connectivity::Eighteen => manhattan <= 2,
                        Connectivity::TwentySix => true,
                    };
                    if keep {
                        out.push((dx, dy, dz));
                    }
                }
            }
        }
        out
    }
}

/// Component labeling result: 0 = background, 1..K component ids ordered by
/// minimum linear voxel index.
#[derive(Debug, Clone)]
pub struct LabeledComponents {
    pub dims: (usize, usize, usize),
    pub labels: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl LabeledComponents {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

/// One RECIST diameter measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct DiameterRecord {
    pub lesion_id: String,
    pub timepoint: u32,
    pub diameter_mm: f64,
}

const INF: f64 = f64::INFINITY;

// 1D squared-distance lower envelope (Felzenszwalb-Huttenlocher) over
// samples at positions i*step.
fn dt1d(f: &[f64], step: f64, out: &mut [f64]) {
    let n = f.len();
    if n == 1 {
        out[0] = f[0];
        return;
    }
    let mut v = vec![0usize; n]; // parabola sites
    let mut z = vec![0.0f64; n + 1]; // envelope boundaries
    let mut k = 0usize;
    z[0] = -INF;
    z[1] = INF;
    let pos = |i: usize| i as f64 * step;
    for q in 1..n {
        if f[q] == INF {
            continue;
        }
        if f[v[0]] == INF && k == 0 {
            v[0] = q;
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + pos(q) * pos(q)) - (f[p] + pos(p) * pos(p)))
                / (2.0 * pos(q) - 2.0 * pos(p));
            if s <= z[k] {
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = INF;
                break;
            }
        }
    }
    let mut k = 0usize;
    for q in 0..n {
        if f[v[0]] == INF {
            out[q] = INF;
            continue;
        }
        while z[k + 1] < pos(q) {
            k += 1;
        }
        let d = pos(q) - pos(v[k]);
        out[q] = d * d + f[v[k]];
    }
}

/// Exact Euclidean distance (mm) to the nearest foreground voxel center;
/// 0 on foreground. Anisotropic spacing honored.
pub fn distance_map(m: &BinaryMask) -> Result<Vec<f64>, RoiError> {
    if m.is_mask_empty() {
        return Err(RoiError::EmptyMask);
    }
    let (nx, ny, nz) = m.dims;
    let (sx, sy, sz) = m.spacing;
    let mut d: Vec<f64> = m.data.iter().map(|&b| if b { 0.0 } else { INF }).collect();

    // x pass
    {
        let mut f = vec![0.0; nx];
        let mut o = vec![0.0; nx];
        for z in 0..nz {
            for y in 0..ny {
                let base = nx * (y + ny * z);
                f.copy_from_slice(&d[base..base + nx]);
                dt1d(&f, sx, &mut o);
                d[base..base + nx].copy_from_slice(&o);
            }
        }
    }
    // y pass
    {
        let mut f = vec![0.0; ny];
        let mut o = vec![0.0; ny];
        for z in 0..nz {
            for x in 0..nx {
                for y in 0..ny {
                    f[y] = d[x + nx * (y + ny * z)];
                }
                dt1d(&f, sy, &mut o);
                for y in 0..ny {
                    d[x + nx * (y + ny * z)] = o[y];
                }
            }
        }
    }
    // z pass
    {
        let mut f = vec![0.0; nz];
        let mut o = vec![0.0; nz];
        for y in 0..ny {
            for x in 0..nx {
                for z in 0..nz {
                    f[z] = d[x + nx * (y + ny * z)];
                }
                dt1d(&f, sz, &mut o);
                for z in 0..nz {
                    d[x + nx * (y + ny * z)] = o[z];
                }
            }
        }
    }
    Ok(d.into_iter().map(f64::sqrt).collect())
}

/// Metric dilation: voxel true iff its exact distance to the mask is <= margin.
pub fn dilate_mask(m: &BinaryMask, margin: f64) -> Result<BinaryMask, RoiError> {
    if margin < 0.0 {
        return Err(RoiError::NegativeMargin(margin));
    }
    if m.is_mask_empty() || margin == 0.0 {
        return Ok(m.clone());
    }
    let d = distance_map(m)?;
    let mut out = m.clone();
    // tolerance keeps exact-radius voxels (e.g. 2.0 mm at margin 2.0) inside
    for (i, &dist) in d.iter().enumerate() {
        out.data[i] = dist <= margin + 1e-9;
    }
    Ok(out)
}

/// Outer boundary band: dilation minus the lesion itself.
pub fn boundary_band(m: &BinaryMask, margin: f64) -> Result<BinaryMask, RoiError> {
    if m.is_mask_empty() {
        return Err(RoiError::EmptyLesion);
    }
    if margin <= 0.0 {
        return Err(RoiError::NegativeMargin(margin));
    }
    let mut band = dilate_mask(m, margin)?;
    for (b, &l) in band.data.iter_mut().zip(&m.data) {
        if l {
            *b = false;
        }
    }
    Ok(band)
}

/// Deterministic connected-component labeling; components are numbered by
/// their minimum linear voxel index.
pub fn connected_components(m: &BinaryMask, connectivity: Connectivity) -> LabeledComponents {
    let (nx, ny, nz) = m.dims;
    let offsets = connectivity.offsets();
    let mut labels = vec![0u32; m.data.len()];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..m.data.len() {
        if !m.data[start] || labels[start] != 0 {
            continue;
        }
        let id = sizes.len() as u32 + 1;
        let mut size = 0usize;
        labels[start] = id;
        stack.push(start);
        while let Some(i) = stack.pop() {
            size += 1;
            let x = (i % nx) as i64;
            let y = ((i / nx) % ny) as i64;
            let z = (i / (nx * ny)) as i64;
            for &(dx, dy, dz) in &offsets {
                let (px, py, pz) = (x + dx, y + dy, z + dz);
                if px < 0 || py < 0 || pz < 0 || px >= nx as i64 || py >= ny as i64 || pz >= nz as i64
                {
                    continue;
                }
                let j = px as usize + nx * (py as usize + ny * pz as usize);
                if m.data[j] && labels[j] == 0 {
                    labels[j] = id;
                    stack.push(j);
                }
            }
        }
        sizes.push(size);
    }
    LabeledComponents {
        dims: m.dims,
        labels,
        sizes,
    }
}

/// RECIST longest diameter: max over axial slices of the maximum pairwise
/// in-plane distance between foreground voxel centers; 0 for an empty mask.
pub fn recist_diameter(m: &BinaryMask) -> f64 {
    let (nx, ny, nz) = m.dims;
    let (sx, sy, _) = m.spacing;
    let mut best: f64 = 0.0;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for z in 0..nz {
        pts.clear();
        for y in 0..ny {
            for x in 0..nx {
                if m.get(x, y, z) && is_slice_boundary(m, x, y, z) {
                    pts.push((x as f64 * sx, y as f64 * sy));
                }
            }
        }
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let dx = pts[i].0 - pts[j].0;
                let dy = pts[i].1 - pts[j].1;
                best = best.max((dx * dx + dy * dy).sqrt());
            }
        }
    }
    best
}

// In-plane boundary test: a foreground voxel missing any 4-neighbor in its
// slice. The pairwise max over boundary voxels equals the max over all.
fn is_slice_boundary(m: &BinaryMask, x: usize, y: usize, z: usize) -> bool {
    let (nx, ny, _) = m.dims;
    if x == 0 || x + 1 == nx || y == 0 || y + 1 == ny {
        return true;
    }
    !(m.get(x - 1, y, z) && m.get(x + 1, y, z) && m.get(x, y - 1, z) && m.get(x, y + 1, z))
}

/// 1 iff some follow-up diameter is at most 70% of baseline (>= 30% shrink,
/// boundary inclusive).
pub fn shrinkage_label(
    baseline: &DiameterRecord,
    followups: &[DiameterRecord],
) -> Result<u8, RoiError> {
    if followups.is_empty() {
        return Err(RoiError::NoFollowups);
    }
    if baseline.diameter_mm <= 0.0 {
        return Err(RoiError::ZeroBaselineDiameter);
    }
    let min_follow = followups
        .iter()
        .map(|r| r.diameter_mm)
        .fold(INF, f64::min);
    Ok(if min_follow <= 0.7 * baseline.diameter_mm + 1e-12 {
        1
    } else {
        0
    })
}
