//! Topology-preserving 3D thinning.
//!
//! Sequential 6-subiteration boundary peeling: per pass, each of the six
//! face directions collects its border voxels, and every candidate that is
//! still a simple point (26-connectivity for the object, 6 for the
//! background) and not a curve endpoint is deleted immediately.
//! Sequential re-checking makes topology preservation unconditional, and
//! the fixed direction/index order makes the result deterministic.

use crate::volume::BinaryMask;

// peel order: -z, +z, -y, +y, -x, +x
const DIRECTIONS: [(i64, i64, i64); 6] = [
    (0, 0, -1),
    (0, 0, 1),
    (0, -1, 0),
    (0, 1, 0),
    (-1, 0, 0),
    (1, 0, 0),
];

/// 1-voxel-wide 26-connected curve skeleton of the mask.
pub fn skeletonize(m: &BinaryMask) -> BinaryMask {
    let mut s = m.clone();
    let (nx, ny, nz) = s.dims;
    loop {
        let mut deleted_any = false;
        for dir in DIRECTIONS {
            // border voxels of this direction
            let mut candidates = Vec::new();
            for z in 0..nz as i64 {
                for y in 0..ny as i64 {
                    for x in 0..nx as i64 {
                        if !get(&s, x, y, z) {
                            continue;
                        }
                        if !get(&s, x + dir.0, y + dir.1, z + dir.2) {
                            candidates.push((x, y, z));
                        }
                    }
                }
            }
            for (x, y, z) in candidates {
                if !get(&s, x, y, z) {
                    continue; // deleted earlier in this subiteration
                }
                if neighbor_count(&s, x, y, z) <= 1 {
                    continue; // endpoint, preserve curve ends
                }
                if is_simple(&s, x, y, z) {
                    s.set(x as usize, y as usize, z as usize, false);
                    deleted_any = true;
                }
            }
        }
        if !deleted_any {
            break;
        }
    }
    s
}

#[inline]
fn get(m: &BinaryMask, x: i64, y: i64, z: i64) -> bool {
    let (nx, ny, nz) = m.dims;
    if x < 0 || y < 0 || z < 0 || x >= nx as i64 || y >= ny as i64 || z >= nz as i64 {
        return false;
    }
    m.get(x as usize, y as usize, z as usize)
}

/// Number of foreground 26-neighbors.
pub fn neighbor_count(m: &BinaryMask, x: i64, y: i64, z: i64) -> usize {
    let mut n = 0;
    for dz in -1..=1 {
        for dy in -1..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 && dz == 0 {
                    continue;
                }
                if get(m, x + dx, y + dy, z + dz) {
                    n += 1;
                }
            }
        }
    }
    n
}

// neighborhood cell index for offsets in {-1,0,1}^3
#[inline]
fn cell(dx: i64, dy: i64, dz: i64) -> usize {
    ((dx + 1) + 3 * (dy + 1) + 9 * (dz + 1)) as usize
}

/// Simple-point test (Bertrand/Malandain characterization): exactly one
/// 26-component of object voxels in N26, and exactly one 6-component of
/// background voxels in N18 that touches a face neighbor of the center.
fn is_simple(m: &BinaryMask, x: i64, y: i64, z: i64) -> bool {
    let mut fg = [false; 27];
    for dz in -1..=1 {
        for dy in -1..=1 {
            for dx in -1i64..=1 {
                fg[cell(dx, dy, dz)] = get(m, x + dx, y + dy, z + dz);
            }
        }
    }
    fg[cell(0, 0, 0)] = false; // center excluded everywhere below

    // condition 1: one 26-component of foreground neighbors
    let mut seen = [false; 27];
    let mut comps = 0;
    for start in 0..27 {
        if start == cell(0, 0, 0) || !fg[start] || seen[start] {
            continue;
        }
        comps += 1;
        if comps > 1 {
            return false;
        }
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(c) = stack.pop() {
            let (cx, cy, cz) = ((c % 3) as i64 - 1, ((c / 3) % 3) as i64 - 1, (c / 9) as i64 - 1);
            for dz in -1..=1 {
                for dy in -1..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 && dz == 0 {
                            continue;
                        }
                        let (px, py, pz) = (cx + dx, cy + dy, cz + dz);
                        if px.abs() > 1 || py.abs() > 1 || pz.abs() > 1 {
                            continue;
                        }
                        if px == 0 && py == 0 && pz == 0 {
                            continue;
                        }
                        let j = cell(px, py, pz);
                        if fg[j] && !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
        }
    }
    if comps != 1 {
        return false;
    }

    // condition 2: one 6-component of background in N18 touching a face
    // neighbor of the center
    let in_n18 = |dx: i64, dy: i64, dz: i64| dx.abs() + dy.abs() + dz.abs() <= 2 && !(dx == 0 && dy == 0 && dz == 0);
    let mut seen = [false; 27];
    let mut touching_comps = 0;
    for sz in -1i64..=1 {
        for sy in -1i64..=1 {
            for sx in -1i64..=1 {
                if !in_n18(sx, sy, sz) {
                    continue;
                }
                let start = cell(sx, sy, sz);
                if fg[start] || seen[start] {
                    continue;
                }
                // flood this background 6-component within N18
                let mut touches_face = false;
                let mut stack = vec![start];
                seen[start] = true;
                while let Some(c) = stack.pop() {
                    let (cx, cy, cz) =
                        ((c % 3) as i64 - 1, ((c / 3) % 3) as i64 - 1, (c / 9) as i64 - 1);
                    if cx.abs() + cy.abs() + cz.abs() == 1 {
                        touches_face = true;
                    }
                    for (dx, dy, dz) in [
                        (1i64, 0i64, 0i64),
                        (-1, 0, 0),
                        (0, 1, 0),
                        (0, -1, 0),
                        (0, 0, 1),
                        (0, 0, -1),
                    ] {
                        let (px, py, pz) = (cx + dx, cy + dy, cz + dz);
                        if px.abs() > 1 || py.abs() > 1 || pz.abs() > 1 {
                            continue;
                        }
                        if !in_n18(px, py, pz) {
                            continue;
                        }
                        let j = cell(px, py, pz);
                        if !fg[j] && !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
                if touches_face {
                    touching_comps += 1;
                    if touching_comps > 1 {
                        return false;
                    }
                }
            }
        }
    }
    touching_comps == 1
}
