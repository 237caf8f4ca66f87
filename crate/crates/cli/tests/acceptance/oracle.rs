//! Naive from-definition texture reference, written independently of the
//! library implementation: line-based run-length encoding for GLRLM,
//! union-find zones for GLSZM, dense matrices and explicit published
//! formulas everywhere, nalgebra for the GLCM correlation eigenproblem.

use nalgebra::DMatrix;
use radqvt::features::GrayLevelVolume;

pub const TOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * 1.0f64.max(a.abs()).max(b.abs())
}

/// All 26 unit offsets, one representative per +/- pair.
fn directions() -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for dz in -1i64..=1 {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if (dz, dy, dx) > (0, 0, 0) {
                    out.push((dx, dy, dz));
                }
            }
        }
    }
    out
}

fn lvl(g: &GrayLevelVolume, x: i64, y: i64, z: i64) -> u32 {
    let (nx, ny, nz) = g.dims;
    if x < 0 || y < 0 || z < 0 || x >= nx as i64 || y >= ny as i64 || z >= nz as i64 {
        0
    } else {
        g.levels[x as usize + nx * (y as usize + ny * z as usize)]
    }
}

fn x_log2(v: f64) -> f64 {
    if v > 0.0 {
        v * v.log2()
    } else {
        0.0
    }
}

// ---------------------------------------------------------------- GLCM

fn glcm_counts(g: &GrayLevelVolume, d: (i64, i64, i64)) -> Vec<Vec<f64>> {
    let ng = g.ng as usize;
    let (nx, ny, nz) = g.dims;
    let mut c = vec![vec![0.0; ng]; ng];
    for z in 0..nz as i64 {
        for y in 0..ny as i64 {
            for x in 0..nx as i64 {
                let a = lvl(g, x, y, z);
                let b = lvl(g, x + d.0, y + d.1, z + d.2);
                if a > 0 && b > 0 {
                    c[(a - 1) as usize][(b - 1) as usize] += 1.0;
                    c[(b - 1) as usize][(a - 1) as usize] += 1.0;
                }
            }
        }
    }
    c
}

fn glcm_feats(c: &[Vec<f64>]) -> Option<Vec<f64>> {
    let ng = c.len();
    let total: f64 = c.iter().flatten().sum();
    if total == 0.0 {
        return None;
    }
    let p = |i: usize, j: usize| c[i][j] / total;
    let g = |i: usize| (i + 1) as f64;
    let px: Vec<f64> = (0..ng).map(|i| (0..ng).map(|j| p(i, j)).sum()).collect();

    let mut mu = 0.0;
    for i in 0..ng {
        mu += g(i) * px[i];
    }
    let mut sigma2 = 0.0;
    for i in 0..ng {
        sigma2 += (g(i) - mu).powi(2) * px[i];
    }

    let mut autocorr = 0.0;
    let mut contrast = 0.0;
    let mut prominence = 0.0;
    let mut shade = 0.0;
    let mut tendency = 0.0;
    let mut id = 0.0;
    let mut idm = 0.0;
    let mut idn = 0.0;
    let mut idmn = 0.0;
    let mut inv_var = 0.0;
    let mut energy = 0.0;
    let mut hxy = 0.0;
    let mut max_p: f64 = 0.0;
    let mut sum_squares = 0.0;
    for i in 0..ng {
        for j in 0..ng {
            let v = p(i, j);
            let diff = (g(i) - g(j)).abs();
            autocorr += g(i) * g(j) * v;
            contrast += diff * diff * v;
            prominence += (g(i) + g(j) - 2.0 * mu).powi(4) * v;
            shade += (g(i) + g(j) - 2.0 * mu).powi(3) * v;
            tendency += (g(i) + g(j) - 2.0 * mu).powi(2) * v;
            id += v / (1.0 + diff);
            idm += v / (1.0 + diff * diff);
            idn += v / (1.0 + diff / ng as f64);
            idmn += v / (1.0 + (diff / ng as f64).powi(2));
            if i != j {
                inv_var += v / (diff * diff);
            }
            energy += v * v;
            hxy -= x_log2(v);
            max_p = max_p.max(v);
            sum_squares += (g(i) - mu).powi(2) * v;
        }
    }
    let correlation = if sigma2 > 1e-12 { (autocorr - mu * mu) / sigma2 } else { 0.0 };

    // sum / difference distributions
    let mut da = 0.0;
    let mut de = 0.0;
    let mut dv = 0.0;
    for k in 0..ng {
        let mut pk = 0.0;
        for i in 0..ng {
            for j in 0..ng {
                if i.abs_diff(j) == k {
                    pk += p(i, j);
                }
            }
        }
        da += k as f64 * pk;
        de -= x_log2(pk);
    }
    for k in 0..ng {
        let mut pk = 0.0;
        for i in 0..ng {
            for j in 0..ng {
                if i.abs_diff(j) == k {
                    pk += p(i, j);
                }
            }
        }
        dv += (k as f64 - da).powi(2) * pk;
    }
    let mut sa = 0.0;
    let mut se = 0.0;
    for k in 2..=2 * ng {
        let mut pk = 0.0;
        for i in 0..ng {
            for j in 0..ng {
                if i + j + 2 == k {
                    pk += p(i, j);
                }
            }
        }
        sa += k as f64 * pk;
        se -= x_log2(pk);
    }

    // information measures
    let hx: f64 = -(0..ng).map(|i| x_log2(px[i])).sum::<f64>();
    let mut hxy1 = 0.0;
    let mut hxy2 = 0.0;
    for i in 0..ng {
        for j in 0..ng {
            let q = px[i] * px[j];
            if q > 0.0 {
                if p(i, j) > 0.0 {
                    hxy1 -= p(i, j) * q.log2();
                }
                hxy2 -= q * q.log2();
            }
        }
    }
    let imc1 = if hx > 1e-12 { (hxy - hxy1) / hx } else { 0.0 };
    let imc2 = {
        let a = 1.0 - (-2.0 * (hxy2 - hxy)).exp();
        if a > 0.0 {
            a.sqrt()
        } else {
            0.0
        }
    };

    // MCC: second-largest eigenvalue of Q restricted to occupied levels
    let active: Vec<usize> = (0..ng).filter(|&i| px[i] > 0.0).collect();
    let mcc = if active.len() < 2 {
        0.0
    } else {
        let k = active.len();
        let b = DMatrix::from_fn(k, k, |r, c| {
            p(active[r], active[c]) / (px[active[r]] * px[active[c]]).sqrt()
        });
        let q = &b * b.transpose();
        let mut eig: Vec<f64> = q.symmetric_eigen().eigenvalues.iter().cloned().collect();
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        eig[1].clamp(0.0, 1.0).sqrt()
    };

    Some(vec![
        autocorr, mu, prominence, shade, tendency, contrast, correlation, da, de, dv, id, idm,
        idmn, idn, imc1, imc2, inv_var, energy, hxy, max_p, mcc, sa, se, sum_squares,
    ])
}

// --------------------------------------------------------------- GLRLM

/// Run counts for one direction via full-line run-length encoding.
fn glrlm_counts(g: &GrayLevelVolume, d: (i64, i64, i64)) -> Vec<((u32, usize), f64)> {
    let (nx, ny, nz) = g.dims;
    let mut runs: std::collections::BTreeMap<(u32, usize), f64> = Default::default();
    for z in 0..nz as i64 {
        for y in 0..ny as i64 {
            for x in 0..nx as i64 {
                // line starts where the previous cell falls off the grid
                let (px, py, pz) = (x - d.0, y - d.1, z - d.2);
                let inside = px >= 0
                    && py >= 0
                    && pz >= 0
                    && px < nx as i64
                    && py < ny as i64
                    && pz < nz as i64;
                if inside {
                    continue;
                }
                // walk the whole line and RLE it
                let mut seq = Vec::new();
                let (mut cx, mut cy, mut cz) = (x, y, z);
                while cx >= 0
                    && cy >= 0
                    && cz >= 0
                    && cx < nx as i64
                    && cy < ny as i64
                    && cz < nz as i64
                {
                    seq.push(lvl(g, cx, cy, cz));
                    cx += d.0;
                    cy += d.1;
                    cz += d.2;
                }
                let mut i = 0usize;
                while i < seq.len() {
                    let v = seq[i];
                    let mut j = i + 1;
                    while j < seq.len() && seq[j] == v {
                        j += 1;
                    }
                    if v > 0 {
                        *runs.entry((v, j - i)).or_insert(0.0) += 1.0;
                    }
                    i = j;
                }
            }
        }
    }
    runs.into_iter().collect()
}

/// The 16 published run/zone features from sparse ((level, len), count).
fn run_style(entries: &[((u32, usize), f64)], np: f64) -> Vec<f64> {
    let nr: f64 = entries.iter().map(|e| e.1).sum();
    if nr == 0.0 {
        return vec![0.0; 16];
    }
    let mut lvl_tot: std::collections::BTreeMap<u32, f64> = Default::default();
    let mut len_tot: std::collections::BTreeMap<usize, f64> = Default::default();
    for &((i, j), c) in entries {
        *lvl_tot.entry(i).or_insert(0.0) += c;
        *len_tot.entry(j).or_insert(0.0) += c;
    }
    let mut sre = 0.0;
    let mut lre = 0.0;
    let mut lgl = 0.0;
    let mut hgl = 0.0;
    let mut srlgl = 0.0;
    let mut srhgl = 0.0;
    let mut lrlgl = 0.0;
    let mut lrhgl = 0.0;
    let mut mu_i = 0.0;
    let mut mu_j = 0.0;
    let mut re = 0.0;
    for &((i, j), c) in entries {
        let (fi, fj) = (i as f64, j as f64);
        sre += c / (fj * fj);
        lre += c * fj * fj;
        lgl += c / (fi * fi);
        hgl += c * fi * fi;
        srlgl += c / (fi * fi * fj * fj);
        srhgl += c * fi * fi / (fj * fj);
        lrlgl += c * fj * fj / (fi * fi);
        lrhgl += c * fi * fi * fj * fj;
        mu_i += fi * c / nr;
        mu_j += fj * c / nr;
        re -= x_log2(c / nr);
    }
    let mut glv = 0.0;
    let mut rv = 0.0;
    for &((i, j), c) in entries {
        glv += (i as f64 - mu_i).powi(2) * c / nr;
        rv += (j as f64 - mu_j).powi(2) * c / nr;
    }
    let gln: f64 = lvl_tot.values().map(|v| v * v).sum::<f64>() / nr;
    let rln: f64 = len_tot.values().map(|v| v * v).sum::<f64>() / nr;
    vec![
        sre / nr,
        lre / nr,
        gln,
        gln / nr,
        rln,
        rln / nr,
        nr / np,
        glv,
        rv,
        re,
        lgl / nr,
        hgl / nr,
        srlgl / nr,
        srhgl / nr,
        lrlgl / nr,
        lrhgl / nr,
    ]
}

// --------------------------------------------------------------- GLSZM

/// Equal-level 26-connected zones via union-find.
fn glszm_entries(g: &GrayLevelVolume) -> Vec<((u32, usize), f64)> {
    let (nx, ny, nz) = g.dims;
    let n = nx * ny * nz;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for z in 0..nz as i64 {
        for y in 0..ny as i64 {
            for x in 0..nx as i64 {
                let a = lvl(g, x, y, z);
                if a == 0 {
                    continue;
                }
                let i = x as usize + nx * (y as usize + ny * z as usize);
                for dz in -1i64..=1 {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            if (dx, dy, dz) == (0, 0, 0) {
                                continue;
                            }
                            if lvl(g, x + dx, y + dy, z + dz) == a {
                                let j = (x + dx) as usize
                                    + nx * ((y + dy) as usize + ny * (z + dz) as usize);
                                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                                parent[ri.max(rj)] = ri.min(rj);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut size: std::collections::BTreeMap<usize, usize> = Default::default();
    for i in 0..n {
        if g.levels[i] > 0 {
            let r = find(&mut parent, i);
            *size.entry(r).or_insert(0) += 1;
        }
    }
    let mut zones: std::collections::BTreeMap<(u32, usize), f64> = Default::default();
    for (root, s) in size {
        *zones.entry((g.levels[root], s)).or_insert(0.0) += 1.0;
    }
    zones.into_iter().collect()
}

// ---------------------------------------------------------- GLDM/NGTDM

fn gldm_entries(g: &GrayLevelVolume) -> Vec<((u32, usize), f64)> {
    let (nx, ny, nz) = g.dims;
    let mut out: std::collections::BTreeMap<(u32, usize), f64> = Default::default();
    for z in 0..nz as i64 {
        for y in 0..ny as i64 {
            for x in 0..nx as i64 {
                let a = lvl(g, x, y, z);
                if a == 0 {
                    continue;
                }
                let mut dep = 1usize;
                for dz in -1i64..=1 {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            if (dx, dy, dz) == (0, 0, 0) {
                                continue;
                            }
                            // alpha = 0: neighbor must match exactly
                            if lvl(g, x + dx, y + dy, z + dz) == a {
                                dep += 1;
                            }
                        }
                    }
                }
                *out.entry((a, dep)).or_insert(0.0) += 1.0;
            }
        }
    }
    out.into_iter().collect()
}

fn gldm_feats(entries: &[((u32, usize), f64)], np: f64) -> Vec<f64> {
    let base = run_style(entries, np);
    let nr: f64 = entries.iter().map(|e| e.1).sum();
    let mut dep_mu = 0.0;
    for &((_, d), c) in entries {
        dep_mu += d as f64 * c / nr;
    }
    let mut dep_var = 0.0;
    let mut dep_ent = 0.0;
    for &((_, d), c) in entries {
        dep_var += (d as f64 - dep_mu).powi(2) * c / nr;
        dep_ent -= x_log2(c / nr);
    }
    vec![
        base[0], base[1], base[2], base[5], base[7], dep_var, dep_ent, base[10], base[11],
        base[12], base[13], base[14], base[15],
    ]
}

fn ngtdm_feats(g: &GrayLevelVolume) -> Vec<f64> {
    let ng = g.ng as usize;
    let (nx, ny, nz) = g.dims;
    let mut n = vec![0.0; ng];
    let mut s = vec![0.0; ng];
    for z in 0..nz as i64 {
        for y in 0..ny as i64 {
            for x in 0..nx as i64 {
                let a = lvl(g, x, y, z);
                if a == 0 {
                    continue;
                }
                let mut sum = 0.0;
                let mut cnt = 0.0;
                for dz in -1i64..=1 {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            if (dx, dy, dz) == (0, 0, 0) {
                                continue;
                            }
                            let b = lvl(g, x + dx, y + dy, z + dz);
                            if b > 0 {
                                sum += b as f64;
                                cnt += 1.0;
                            }
                        }
                    }
                }
                if cnt > 0.0 {
                    n[(a - 1) as usize] += 1.0;
                    s[(a - 1) as usize] += (a as f64 - sum / cnt).abs();
                }
            }
        }
    }
    let nvp: f64 = n.iter().sum();
    if nvp == 0.0 {
        return vec![0.0; 5];
    }
    let p: Vec<f64> = n.iter().map(|&v| v / nvp).collect();
    let active: Vec<usize> = (0..ng).filter(|&i| p[i] > 0.0).collect();
    let ngp = active.len() as f64;

    let psum: f64 = (0..ng).map(|i| p[i] * s[i]).sum();
    let coarseness = if psum > 0.0 { 1.0 / psum } else { 1e6 };

    let ssum: f64 = s.iter().sum();
    let mut pair = 0.0;
    let mut busy_den = 0.0;
    let mut complexity = 0.0;
    let mut strength = 0.0;
    for &i in &active {
        for &j in &active {
            let dg = (i as f64) - (j as f64);
            pair += p[i] * p[j] * dg * dg;
            busy_den += ((i + 1) as f64 * p[i] - (j + 1) as f64 * p[j]).abs();
            complexity += dg.abs() * (p[i] * s[i] + p[j] * s[j]) / (p[i] + p[j]);
            strength += (p[i] + p[j]) * dg * dg;
        }
    }
    let contrast = if ngp > 1.0 { pair / (ngp * (ngp - 1.0)) * ssum / nvp } else { 0.0 };
    let busyness = if busy_den > 0.0 { psum / busy_den } else { 0.0 };
    vec![
        coarseness,
        contrast,
        busyness,
        complexity / nvp,
        if ssum > 0.0 { strength / ssum } else { 0.0 },
    ]
}

// ---------------------------------------------------------------- entry

/// All 74 texture features per the published definitions, keyed like the
/// library output.
pub fn reference_texture(g: &GrayLevelVolume) -> Vec<(String, f64)> {
    let np = g.levels.iter().filter(|&&l| l > 0).count() as f64;
    let dirs = directions();
    let glcm_names = [
        "Autocorrelation", "JointAverage", "ClusterProminence", "ClusterShade",
        "ClusterTendency", "Contrast", "Correlation", "DifferenceAverage",
        "DifferenceEntropy", "DifferenceVariance", "Id", "Idm", "Idmn", "Idn",
        "Imc1", "Imc2", "InverseVariance", "JointEnergy", "JointEntropy",
        "MaximumProbability", "Mcc", "SumAverage", "SumEntropy", "SumSquares",
    ];
    let glrlm_names = [
        "ShortRunEmphasis", "LongRunEmphasis", "GrayLevelNonUniformity",
        "GrayLevelNonUniformityNormalized", "RunLengthNonUniformity",
        "RunLengthNonUniformityNormalized", "RunPercentage", "GrayLevelVariance",
        "RunVariance", "RunEntropy", "LowGrayLevelRunEmphasis",
        "HighGrayLevelRunEmphasis", "ShortRunLowGrayLevelEmphasis",
        "ShortRunHighGrayLevelEmphasis", "LongRunLowGrayLevelEmphasis",
        "LongRunHighGrayLevelEmphasis",
    ];
    let glszm_names = [
        "SmallAreaEmphasis", "LargeAreaEmphasis", "GrayLevelNonUniformity",
        "GrayLevelNonUniformityNormalized", "SizeZoneNonUniformity",
        "SizeZoneNonUniformityNormalized", "ZonePercentage", "GrayLevelVariance",
        "ZoneVariance", "ZoneEntropy", "LowGrayLevelZoneEmphasis",
        "HighGrayLevelZoneEmphasis", "SmallAreaLowGrayLevelEmphasis",
        "SmallAreaHighGrayLevelEmphasis", "LargeAreaLowGrayLevelEmphasis",
        "LargeAreaHighGrayLevelEmphasis",
    ];
    let gldm_names = [
        "SmallDependenceEmphasis", "LargeDependenceEmphasis", "GrayLevelNonUniformity",
        "DependenceNonUniformityNormalized", "GrayLevelVariance", "DependenceVariance",
        "DependenceEntropy", "LowGrayLevelEmphasis", "HighGrayLevelEmphasis",
        "SmallDependenceLowGrayLevelEmphasis", "SmallDependenceHighGrayLevelEmphasis",
        "LargeDependenceLowGrayLevelEmphasis", "LargeDependenceHighGrayLevelEmphasis",
    ];
    let ngtdm_names = ["Coarseness", "Contrast", "Busyness", "Complexity", "Strength"];

    let mut out = Vec::with_capacity(74);

    // GLCM: per-direction features averaged, skipping pair-less directions
    let mut acc = vec![0.0; 24];
    let mut used = 0usize;
    for &d in &dirs {
        if let Some(f) = glcm_feats(&glcm_counts(g, d)) {
            for (a, v) in acc.iter_mut().zip(f) {
                *a += v;
            }
            used += 1;
        }
    }
    for (name, a) in glcm_names.iter().zip(acc) {
        out.push((format!("glcm_{name}"), if used > 0 { a / used as f64 } else { 0.0 }));
    }

    // GLRLM: per-direction 16 features averaged
    let mut acc = vec![0.0; 16];
    for &d in &dirs {
        for (a, v) in acc.iter_mut().zip(run_style(&glrlm_counts(g, d), np)) {
            *a += v;
        }
    }
    for (name, a) in glrlm_names.iter().zip(acc) {
        out.push((format!("glrlm_{name}"), a / dirs.len() as f64));
    }

    for (name, v) in glszm_names.iter().zip(run_style(&glszm_entries(g), np)) {
        out.push((format!("glszm_{name}"), v));
    }
    for (name, v) in gldm_names.iter().zip(gldm_feats(&gldm_entries(g), np)) {
        out.push((format!("gldm_{name}"), v));
    }
    for (name, v) in ngtdm_names.iter().zip(ngtdm_feats(g)) {
        out.push((format!("ngtdm_{name}"), v));
    }
    out
}

/// Compare the library output against the reference; returns mismatches.
pub fn compare(g: &GrayLevelVolume) -> Vec<String> {
    let lib = radqvt::features::texture_features(g);
    let mut bad = Vec::new();
    for (name, want) in reference_texture(g) {
        match lib.get(&name) {
            Some(got) if close(got, want) => {}
            Some(got) => bad.push(format!("{name}: lib {got:.15e} vs oracle {want:.15e}")),
            None => bad.push(format!("{name}: missing from library output")),
        }
    }
    bad
}
