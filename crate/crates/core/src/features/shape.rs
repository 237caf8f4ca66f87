//! The three size-free shape descriptors: Sphericity, Elongation, Flatness.
//!
//! Surface area comes from a marching-tetrahedra mesh of the mask after a
//! 3x3x3 box-mean smoothing; the raw binary staircase surface would
//! overestimate a sphere's area by ~27%, while the smoothed mesh is within
//! a couple of percent.

use super::{FeatureError, FeatureVector};
use crate::linalg::symmetric_eigenvalues;
use crate::volume::BinaryMask;

pub const SHAPE_IDS: [&str; 3] = ["shape_Sphericity", "shape_Elongation", "shape_Flatness"];

// cube corner i has offset (i&1, (i>>1)&1, (i>>2)&1); the 6 tetrahedra share
// the 0-7 diagonal
const TETS: [[usize; 4]; 6] = [
    [0, 5, 1, 7],
    [0, 1, 3, 7],
    [0, 3, 2, 7],
    [0, 2, 6, 7],
    [0, 6, 4, 7],
    [0, 4, 5, 7],
];

fn corner_offset(i: usize) -> (f64, f64, f64) {
    ((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64)
}

/// Mesh surface area (mm^2) of the 0.5-level set of the box-smoothed mask.
pub fn surface_area_mm2(m: &BinaryMask) -> f64 {
    let (nx, ny, nz) = m.dims;
    let (sx, sy, sz) = m.spacing;
    // pad by 2: one voxel so the surface closes, one for the smoothing stencil
    let (px, py, pz) = (nx + 4, ny + 4, nz + 4);
    let mut field = vec![0.0f64; px * py * pz];
    let fidx = |x: usize, y: usize, z: usize| x + px * (y + py * z);
    for (x, y, z) in m.foreground() {
        field[fidx(x + 2, y + 2, z + 2)] = 1.0;
    }
    // 3x3x3 box mean
    let mut smooth = vec![0.0f64; px * py * pz];
    for z in 1..pz - 1 {
        for y in 1..py - 1 {
            for x in 1..px - 1 {
                let mut s = 0.0;
                for dz in 0..3 {
                    for dy in 0..3 {
                        for dx in 0..3 {
                            s += field[fidx(x + dx - 1, y + dy - 1, z + dz - 1)];
                        }
                    }
                }
                smooth[fidx(x, y, z)] = s / 27.0;
            }
        }
    }
    let level = 0.5;
    let mut area = 0.0;
    let mut vals = [0.0f64; 8];
    for z in 0..pz - 1 {
        for y in 0..py - 1 {
            for x in 0..px - 1 {
                let mut any_in = false;
                let mut any_out = false;
                for (c, val) in vals.iter_mut().enumerate() {
                    let (dx, dy, dz) = ((c & 1), ((c >> 1) & 1), ((c >> 2) & 1));
                    *val = smooth[fidx(x + dx, y + dy, z + dz)];
                    if *val > level {
                        any_in = true;
                    } else {
                        any_out = true;
                    }
                }
                if !(any_in && any_out) {
                    continue;
                }
                for tet in &TETS {
                    area += tet_patch_area(tet, &vals, level, (sx, sy, sz));
                }
            }
        }
    }
    area
}

fn tet_patch_area(tet: &[usize; 4], vals: &[f64; 8], level: f64, sp: (f64, f64, f64)) -> f64 {
    let mut inside = [false; 4];
    let mut n_in = 0;
    for (t, &c) in tet.iter().enumerate() {
        inside[t] = vals[c] > level;
        if inside[t] {
            n_in += 1;
        }
    }
    if n_in == 0 || n_in == 4 {
        return 0.0;
    }
    let pos = |c: usize| {
        let (ox, oy, oz) = corner_offset(c);
        (ox * sp.0, oy * sp.1, oz * sp.2)
    };
    let interp = |a: usize, b: usize| {
        let (va, vb) = (vals[tet[a]], vals[tet[b]]);
        let t = (level - va) / (vb - va);
        let pa = pos(tet[a]);
        let pb = pos(tet[b]);
        (
            pa.0 + t * (pb.0 - pa.0),
            pa.1 + t * (pb.1 - pa.1),
            pa.2 + t * (pb.2 - pa.2),
        )
    };
    let ins: Vec<usize> = (0..4).filter(|&t| inside[t]).collect();
    let outs: Vec<usize> = (0..4).filter(|&t| !inside[t]).collect();
    match n_in {
        1 => {
            let a = ins[0];
            tri_area(interp(a, outs[0]), interp(a, outs[1]), interp(a, outs[2]))
        }
        3 => {
            let a = outs[0];
            tri_area(interp(ins[0], a), interp(ins[1], a), interp(ins[2], a))
        }
        _ => {
            let (a, b) = (ins[0], ins[1]);
            let (c, d) = (outs[0], outs[1]);
            let q1 = interp(a, c);
            let q2 = interp(a, d);
            let q3 = interp(b, d);
            let q4 = interp(b, c);
            tri_area(q1, q2, q3) + tri_area(q1, q3, q4)
        }
    }
}

fn tri_area(a: (f64, f64, f64), b: (f64, f64, f64), c: (f64, f64, f64)) -> f64 {
    let u = (b.0 - a.0, b.1 - a.1, b.2 - a.2);
    let v = (c.0 - a.0, c.1 - a.1, c.2 - a.2);
    let cx = u.1 * v.2 - u.2 * v.1;
    let cy = u.2 * v.0 - u.0 * v.2;
    let cz = u.0 * v.1 - u.1 * v.0;
    0.5 * (cx * cx + cy * cy + cz * cz).sqrt()
}

/// Descending principal-component eigenvalues of voxel-center coordinates (mm).
fn principal_eigenvalues(m: &BinaryMask) -> [f64; 3] {
    let (sx, sy, sz) = m.spacing;
    let pts: Vec<(f64, f64, f64)> = m
        .foreground()
        .map(|(x, y, z)| (x as f64 * sx, y as f64 * sy, z as f64 * sz))
        .collect();
    let n = pts.len() as f64;
    let mut mu = (0.0, 0.0, 0.0);
    for p in &pts {
        mu.0 += p.0;
        mu.1 += p.1;
        mu.2 += p.2;
    }
    mu = (mu.0 / n, mu.1 / n, mu.2 / n);
    let mut cov = [[0.0f64; 3]; 3];
    for p in &pts {
        let d = [p.0 - mu.0, p.1 - mu.1, p.2 - mu.2];
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += d[i] * d[j];
            }
        }
    }
    let cov: Vec<Vec<f64>> = cov.iter().map(|r| r.iter().map(|&x| x / n).collect()).collect();
    let eig = symmetric_eigenvalues(cov);
    [eig[0].max(0.0), eig[1].max(0.0), eig[2].max(0.0)]
}

fn sphericity(m: &BinaryMask) -> f64 {
    let voxel_vol = m.spacing.0 * m.spacing.1 * m.spacing.2;
    let volume = m.count() as f64 * voxel_vol;
    let area = surface_area_mm2(m);
    if area <= 0.0 {
        return 0.0;
    }
    (36.0 * std::f64::consts::PI * volume * volume).powf(1.0 / 3.0) / area
}

/// Strict variant: degenerate (collinear/coplanar or < 4 voxels) ROIs error.
pub fn shape_features(m: &BinaryMask) -> Result<FeatureVector, FeatureError> {
    if m.is_mask_empty() {
        return Err(FeatureError::EmptyRoi);
    }
    if m.count() < 4 {
        return Err(FeatureError::DegenerateGeometry);
    }
    let eig = principal_eigenvalues(m);
    let scale = m.spacing.0 * m.spacing.1 * m.spacing.2;
    let tol = 1e-9 * scale.powf(2.0 / 3.0);
    if eig[0] <= tol || eig[2] <= tol {
        return Err(FeatureError::DegenerateGeometry);
    }
    let mut out = FeatureVector::new();
    out.push("shape_Sphericity", sphericity(m));
    out.push("shape_Elongation", (eig[1] / eig[0]).sqrt());
    out.push("shape_Flatness", (eig[2] / eig[0]).sqrt());
    Ok(out)
}

/// Guarded variant used in batch extraction: degenerate ROIs yield 0 for the
/// axis ratios instead of an error, keeping vectors finite.
pub fn shape_features_guarded(m: &BinaryMask) -> FeatureVector {
    match shape_features(m) {
        Ok(f) => f,
        Err(_) => {
            let mut out = FeatureVector::new();
            out.push("shape_Sphericity", if m.is_mask_empty() { 0.0 } else { sphericity(m) });
            out.push("shape_Elongation", 0.0);
            out.push("shape_Flatness", 0.0);
            out
        }
    }
}
