//! Skeleton branch decomposition.
//!
//! Voxels are classified by their 26-neighbor count on the skeleton
//! (1 endpoint, 2 regular, >= 3 junction); 26-adjacent junction voxels are
//! merged into one node; branches are maximal regular-voxel paths between
//! nodes. Spur branches shorter than `min_spur` voxels are pruned and the
//! classification recomputed once.

use std::collections::{BTreeMap, BTreeSet};

use crate::volume::BinaryMask;

type Voxel = (i64, i64, i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Isolated,
    Endpoint,
    Regular,
    Junction,
}

/// One skeleton branch; path coordinates are in mm (voxel index * spacing).
#[derive(Debug, Clone)]
pub struct Branch {
    pub path_vox: Vec<Voxel>,
    pub path_mm: Vec<(f64, f64, f64)>,
    pub geodesic_mm: f64,
    pub chord_mm: f64,
    /// true for a pure cycle (first voxel repeated at the end).
    pub closed: bool,
}

impl Branch {
    pub fn voxel_count(&self) -> usize {
        if self.closed {
            self.path_vox.len() - 1
        } else {
            self.path_vox.len()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SkeletonGraph {
    pub spacing: (f64, f64, f64),
    pub kinds: BTreeMap<Voxel, NodeKind>,
    pub branches: Vec<Branch>,
    pub endpoint_count: usize,
    /// Junction clusters (26-adjacent junction voxels merged).
    pub junction_count: usize,
    /// Independent cycles of the branch graph.
    pub cycle_count: usize,
}

impl SkeletonGraph {
    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }
}

fn dist(a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2) + (a.2 - b.2).powi(2)).sqrt()
}

fn neighbors_of(v: Voxel, set: &BTreeSet<Voxel>) -> Vec<Voxel> {
    let mut out = Vec::new();
    for dz in -1..=1 {
        for dy in -1..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 && dz == 0 {
                    continue;
                }
                let u = (v.0 + dx, v.1 + dy, v.2 + dz);
                if set.contains(&u) {
                    out.push(u);
                }
            }
        }
    }
    out
}

struct Decomposition {
    kinds: BTreeMap<Voxel, NodeKind>,
    branches: Vec<Branch>,
    endpoint_count: usize,
    junction_count: usize,
    cycle_count: usize,
}

fn classify(set: &BTreeSet<Voxel>) -> BTreeMap<Voxel, NodeKind> {
    set.iter()
        .map(|&v| {
            let k = match neighbors_of(v, set).len() {
                0 => NodeKind::Isolated,
                1 => NodeKind::Endpoint,
                2 => NodeKind::Regular,
                _ => NodeKind::Junction,
            };
            (v, k)
        })
        .collect()
}

fn make_branch(path_vox: Vec<Voxel>, spacing: (f64, f64, f64), closed: bool) -> Branch {
    let path_mm: Vec<(f64, f64, f64)> = path_vox
        .iter()
        .map(|&(x, y, z)| (x as f64 * spacing.0, y as f64 * spacing.1, z as f64 * spacing.2))
        .collect();
    let geodesic_mm = path_mm.windows(2).map(|w| dist(w[0], w[1])).sum();
    let chord_mm = dist(path_mm[0], *path_mm.last().unwrap());
    Branch {
        path_vox,
        path_mm,
        geodesic_mm,
        chord_mm,
        closed,
    }
}

fn decompose_once(set: &BTreeSet<Voxel>, spacing: (f64, f64, f64)) -> Decomposition {
    let kinds = classify(set);

    // junction clusters
    let mut cluster_of: BTreeMap<Voxel, usize> = BTreeMap::new();
    let mut n_clusters = 0usize;
    for (&v, &k) in &kinds {
        if k != NodeKind::Junction || cluster_of.contains_key(&v) {
            continue;
        }
        let id = n_clusters;
        n_clusters += 1;
        let mut stack = vec![v];
        cluster_of.insert(v, id);
        while let Some(c) = stack.pop() {
            for u in neighbors_of(c, set) {
                if kinds[&u] == NodeKind::Junction && !cluster_of.contains_key(&u) {
                    cluster_of.insert(u, id);
                    stack.push(u);
                }
            }
        }
    }

    let is_node = |v: &Voxel| matches!(kinds[v], NodeKind::Endpoint | NodeKind::Junction);

    let mut consumed: BTreeSet<(Voxel, Voxel)> = BTreeSet::new();
    let mut on_branch: BTreeSet<Voxel> = BTreeSet::new();
    let mut branches = Vec::new();

    for (&v, _) in kinds.iter().filter(|(_, &k)| k == NodeKind::Endpoint || k == NodeKind::Junction) {
        for u in neighbors_of(v, set) {
            if consumed.contains(&(v, u)) {
                continue;
            }
            // intra-cluster junction edges are part of the node, not a branch
            if kinds[&v] == NodeKind::Junction
                && kinds[&u] == NodeKind::Junction
                && cluster_of[&v] == cluster_of[&u]
            {
                continue;
            }
            let mut path = vec![v, u];
            consumed.insert((v, u));
            consumed.insert((u, v));
            let mut prev = v;
            let mut cur = u;
            while !is_node(&cur) {
                on_branch.insert(cur);
                let next = neighbors_of(cur, set).into_iter().find(|&n| n != prev);
                let Some(next) = next else { break };
                consumed.insert((cur, next));
                consumed.insert((next, cur));
                path.push(next);
                prev = cur;
                cur = next;
            }
            branches.push(make_branch(path, spacing, false));
        }
    }

    // pure cycles: regular voxels untouched by any branch walk
    let mut cycle_anchors = 0usize;
    let mut in_cycle: BTreeSet<Voxel> = BTreeSet::new();
    for (&v, &k) in &kinds {
        if k != NodeKind::Regular || on_branch.contains(&v) || in_cycle.contains(&v) {
            continue;
        }
        cycle_anchors += 1;
        let mut path = vec![v];
        in_cycle.insert(v);
        let mut prev = v;
        let mut cur = neighbors_of(v, set)[0];
        while cur != v {
            path.push(cur);
            in_cycle.insert(cur);
            let next = neighbors_of(cur, set)
                .into_iter()
                .find(|&n| n != prev)
                .expect("regular cycle voxel has two neighbors");
            prev = cur;
            cur = next;
        }
        path.push(v);
        branches.push(make_branch(path, spacing, true));
    }

    // cycle rank B - N + C over the branch graph; isolated voxels and cycle
    // anchors count as nodes
    let endpoint_count = kinds.values().filter(|&&k| k == NodeKind::Endpoint).count();
    let isolated = kinds.values().filter(|&&k| k == NodeKind::Isolated).count();
    let n_nodes = endpoint_count + n_clusters + isolated + cycle_anchors;
    let n_components = count_components(set);
    let cycle_count = (branches.len() + n_components).saturating_sub(n_nodes);

    Decomposition {
        kinds,
        branches,
        endpoint_count,
        junction_count: n_clusters,
        cycle_count,
    }
}

fn count_components(set: &BTreeSet<Voxel>) -> usize {
    let mut seen: BTreeSet<Voxel> = BTreeSet::new();
    let mut n = 0;
    for &v in set {
        if seen.contains(&v) {
            continue;
        }
        n += 1;
        let mut stack = vec![v];
        seen.insert(v);
        while let Some(c) = stack.pop() {
            for u in neighbors_of(c, set) {
                if seen.insert(u) {
                    stack.push(u);
                }
            }
        }
    }
    n
}

/// Decompose a thinned skeleton into branches, pruning endpoint-to-junction
/// spurs shorter than `min_spur` voxels.
pub fn branch_decompose(skeleton: &BinaryMask, min_spur: usize) -> SkeletonGraph {
    let spacing = skeleton.spacing;
    let mut set: BTreeSet<Voxel> = skeleton
        .foreground()
        .map(|(x, y, z)| (x as i64, y as i64, z as i64))
        .collect();
    let mut d = decompose_once(&set, spacing);

    if min_spur > 1 {
        let mut pruned_any = false;
        for b in &d.branches {
            if b.closed {
                continue;
            }
            let first_k = d.kinds[&b.path_vox[0]];
            let last_k = d.kinds[b.path_vox.last().unwrap()];
            let spur = matches!(
                (first_k, last_k),
                (NodeKind::Endpoint, NodeKind::Junction) | (NodeKind::Junction, NodeKind::Endpoint)
            );
            // spur length counts only the voxels that would be removed,
            // not the junction attachment
            if !spur || b.path_vox.len() - 1 >= min_spur {
                continue;
            }
            for (i, v) in b.path_vox.iter().enumerate() {
                let keep_junction = (i == 0 && first_k == NodeKind::Junction)
                    || (i == b.path_vox.len() - 1 && last_k == NodeKind::Junction);
                if !keep_junction {
                    set.remove(v);
                }
            }
            pruned_any = true;
        }
        if pruned_any {
            d = decompose_once(&set, spacing);
        }
    }

    SkeletonGraph {
        spacing,
        kinds: d.kinds,
        branches: d.branches,
        endpoint_count: d.endpoint_count,
        junction_count: d.junction_count,
        cycle_count: d.cycle_count,
    }
}
