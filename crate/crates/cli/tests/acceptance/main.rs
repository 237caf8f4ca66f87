//! Verification gate. Each criterion prints one PASS/FAIL line; the suite
//! fails if any criterion does. Run with `-- --nocapture` to see the lines
//! on success.

mod oracle;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use radqvt::features::{shape_features, GrayLevelVolume};
use radqvt::ml::{
    kfold_cv, roc_auc, roc_points, train_gradient_boosting, train_random_forest, Dataset,
    GbParams, ModelKind, RfParams,
};
use radqvt::phantom::{ellipsoid_phantom, planted_dataset, tube_phantom, ParametricCurve,
    PlantedConfig};
use radqvt::pipeline::{extract, feature_columns, read_feature_csv, write_feature_csv,
    PipelineConfig, Profile};
use radqvt::roi::{dilate_mask, distance_map};
use radqvt::vessel::{branch_decompose, branch_tortuosity, curvature_profile,
    fractal_dimensions, skeletonize, Branch, FRACTAL_IDS};
use radqvt::{BinaryMask, ScalarVolume};

type Check = (&'static str, fn() -> Result<String, String>);

#[test]
fn acceptance() {
    let checks: Vec<Check> = vec![
        ("texture-reference-equivalence", texture_reference_equivalence),
        ("distance-and-dilation-oracle", distance_and_dilation_oracle),
        ("feature-column-counts", feature_column_counts),
        ("tortuosity-analytics", tortuosity_analytics),
        ("curvature-analytics", curvature_analytics),
        ("fractal-dimension-analytics", fractal_dimension_analytics),
        ("skeleton-topology", skeleton_topology),
        ("shape-sphericity-and-scale", shape_sphericity_and_scale),
        ("roc-auc-hand-case", roc_auc_hand_case),
        ("single-roi-extraction-speed", single_roi_extraction_speed),
        ("cli-determinism", cli_determinism),
        ("end-to-end-planted-cohort", end_to_end_planted_cohort),
    ];
    let mut failures = Vec::new();
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS {name} ({detail})"),
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}

// ------------------------------------------------------------- texture

fn texture_reference_equivalence() -> Result<String, String> {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e87);
    let cases = 200;
    for case in 0..cases {
        let dims = (
            rng.gen_range(1..=6usize),
            rng.gen_range(1..=6usize),
            rng.gen_range(1..=6usize),
        );
        let n = dims.0 * dims.1 * dims.2;
        let hi = rng.gen_range(1..=4u32);
        let mut levels = vec![0u32; n];
        for l in levels.iter_mut() {
            if rng.gen_bool(0.7) {
                *l = rng.gen_range(1..=hi);
            }
        }
        if levels.iter().all(|&l| l == 0) {
            levels[0] = hi;
        }
        let ng = *levels.iter().max().unwrap();
        let g = GrayLevelVolume {
            dims,
            spacing: (1.0, 1.0, 1.0),
            levels,
            ng,
            bin_width: 1.0,
            roi_min: 0.0,
        };
        let bad = oracle::compare(&g);
        if !bad.is_empty() {
            return Err(format!("case {case} dims {dims:?} ng {ng}: {}", bad.join("; ")));
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    if dt >= 60.0 {
        return Err(format!("{cases} cases took {dt:.1}s, budget 60s"));
    }
    Ok(format!("{cases} random volumes, 74 features each, {dt:.1}s"))
}

// ---------------------------------------------------------- morphology

fn brute_distance(m: &BinaryMask, x: usize, y: usize, z: usize) -> f64 {
    let (sx, sy, sz) = m.spacing;
    let mut best = f64::INFINITY;
    for (fx, fy, fz) in m.foreground() {
        let dx = (fx as f64 - x as f64) * sx;
        let dy = (fy as f64 - y as f64) * sy;
        let dz = (fz as f64 - z as f64) * sz;
        best = best.min((dx * dx + dy * dy + dz * dz).sqrt());
    }
    best
}

fn distance_and_dilation_oracle() -> Result<String, String> {
    // single voxel, isotropic grid, margin 2.5 mm: exactly 81 voxels
    let mut single = BinaryMask::empty((9, 9, 9), (1.0, 1.0, 1.0), (0.0, 0.0, 0.0));
    single.set(4, 4, 4, true);
    let ball = dilate_mask(&single, 2.5).map_err(|e| e.to_string())?;
    if ball.count() != 81 {
        return Err(format!("single-voxel dilation at 2.5 mm gave {} voxels, want 81", ball.count()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xd157);
    for case in 0..40 {
        let dims = (
            rng.gen_range(2..=7usize),
            rng.gen_range(2..=7usize),
            rng.gen_range(2..=7usize),
        );
        let spacing = (
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
        );
        let mut m = BinaryMask::empty(dims, spacing, (0.0, 0.0, 0.0));
        for b in m.data.iter_mut() {
            *b = rng.gen_bool(0.3);
        }
        if m.is_mask_empty() {
            m.set(0, 0, 0, true);
        }
        let d = distance_map(&m).map_err(|e| e.to_string())?;
        let margin = rng.gen_range(0.6..2.5);
        let dil = dilate_mask(&m, margin).map_err(|e| e.to_string())?;
        for z in 0..dims.2 {
            for y in 0..dims.1 {
                for x in 0..dims.0 {
                    let i = m.index(x, y, z);
                    let want = brute_distance(&m, x, y, z);
                    if (d[i] - want).abs() > 1e-9 * want.max(1.0) {
                        return Err(format!(
                            "case {case} EDT at ({x},{y},{z}): {} vs brute {want}",
                            d[i]
                        ));
                    }
                    let inside = want <= margin + 1e-9;
                    if dil.data[i] != inside {
                        return Err(format!(
                            "case {case} dilation at ({x},{y},{z}): {} vs brute {inside}",
                            dil.data[i]
                        ));
                    }
                }
            }
        }
    }
    Ok("81-voxel ball exact; 40 random EDT + dilation grids match brute force".into())
}

// ------------------------------------------------------------- columns

fn feature_column_counts() -> Result<String, String> {
    let both = feature_columns(Profile::Both).len();
    let tp1 = feature_columns(Profile::Tp1).len();
    let tp2 = feature_columns(Profile::Tp2).len();
    if (both, tp1, tp2) != (460, 230, 230) {
        return Err(format!("got both={both} tp1={tp1} tp2={tp2}, want 460/230/230"));
    }
    Ok("460 both, 230 per timepoint".into())
}

// ----------------------------------------------------------- analytics

fn branch_from_curve(c: &ParametricCurve) -> Branch {
    let path_mm = c.points.clone();
    let d = |a: (f64, f64, f64), b: (f64, f64, f64)| {
        ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2) + (a.2 - b.2).powi(2)).sqrt()
    };
    let geodesic_mm = path_mm.windows(2).map(|w| d(w[0], w[1])).sum();
    let chord_mm = d(path_mm[0], *path_mm.last().unwrap());
    Branch {
        path_vox: vec![(0, 0, 0); path_mm.len()],
        path_mm,
        geodesic_mm,
        chord_mm,
        closed: false,
    }
}

fn tortuosity_analytics() -> Result<String, String> {
    let t_line = branch_tortuosity(&branch_from_curve(&ParametricCurve::line(30.0, 200)))
        .map_err(|e| e.to_string())?;
    if (t_line - 1.0).abs() > 0.02 {
        return Err(format!("straight line tortuosity {t_line}, want 1.000 +/- 0.02"));
    }
    let semi = ParametricCurve::circle_arc(25.0, std::f64::consts::PI, 400);
    let t_semi = branch_tortuosity(&branch_from_curve(&semi)).map_err(|e| e.to_string())?;
    let want_semi = std::f64::consts::FRAC_PI_2;
    if (t_semi - want_semi).abs() / want_semi > 0.03 {
        return Err(format!("semicircle tortuosity {t_semi}, want pi/2 +/- 3%"));
    }
    let quarter = ParametricCurve::circle_arc(25.0, std::f64::consts::FRAC_PI_2, 400);
    let t_q = branch_tortuosity(&branch_from_curve(&quarter)).map_err(|e| e.to_string())?;
    let want_q = std::f64::consts::PI / (2.0 * 2.0f64.sqrt()); // 1.111
    if (t_q - want_q).abs() / want_q > 0.03 {
        return Err(format!("quarter-circle tortuosity {t_q}, want 1.111 +/- 3%"));
    }
    Ok(format!("line {t_line:.4}, semicircle {t_semi:.4}, quarter {t_q:.4}"))
}

fn curvature_analytics() -> Result<String, String> {
    // helix R = 10 mm, b = 5 mm: kappa = R / (R^2 + b^2) = 0.08 / mm
    let helix = ParametricCurve::helix(10.0, 5.0, 3.0, 600);
    let prof = curvature_profile(&branch_from_curve(&helix), 2);
    if prof.is_empty() {
        return Err("helix curvature profile is empty".into());
    }
    let mean_h = prof.iter().sum::<f64>() / prof.len() as f64;
    if (mean_h - 0.08).abs() / 0.08 > 0.10 {
        return Err(format!("helix mean curvature {mean_h}, want 0.08 +/- 10%"));
    }
    let circle = ParametricCurve::circle_arc(20.0, 1.5 * std::f64::consts::PI, 500);
    let prof = curvature_profile(&branch_from_curve(&circle), 2);
    let mean_c = prof.iter().sum::<f64>() / prof.len() as f64;
    if (mean_c - 0.05).abs() / 0.05 > 0.10 {
        return Err(format!("circle mean curvature {mean_c}, want 0.05 +/- 10%"));
    }
    Ok(format!("helix {mean_h:.4}/mm, circle {mean_c:.4}/mm"))
}

fn fractal_dimension_analytics() -> Result<String, String> {
    let mut cube = BinaryMask::empty((256, 256, 256), (1.0, 1.0, 1.0), (0.0, 0.0, 0.0));
    cube.data.fill(true);
    let fv = fractal_dimensions(&cube);
    for k in 1..=8 {
        let fd = fv.get(FRACTAL_IDS[k - 1]).unwrap();
        if (fd - 3.0).abs() > 1e-9 {
            return Err(format!("256^3 cube {} = {fd}, want 3.0 +/- 1e-9", FRACTAL_IDS[k - 1]));
        }
    }
    let mut line = BinaryMask::empty((1024, 1, 1), (1.0, 1.0, 1.0), (0.0, 0.0, 0.0));
    line.data.fill(true);
    let fv = fractal_dimensions(&line);
    for id in FRACTAL_IDS {
        let fd = fv.get(id).unwrap();
        if (fd - 1.0).abs() > 1e-9 {
            return Err(format!("1024-voxel line {id} = {fd}, want 1.0 +/- 1e-9"));
        }
    }
    let mut dot = BinaryMask::empty((8, 8, 8), (1.0, 1.0, 1.0), (0.0, 0.0, 0.0));
    dot.set(3, 3, 3, true);
    let fv = fractal_dimensions(&dot);
    if !FRACTAL_IDS.iter().all(|id| fv.get(id).unwrap() == 0.0) {
        return Err("single voxel should give all-zero fractal dimensions".into());
    }
    Ok("cube 3.0, line 1.0, single voxel 0".into())
}

fn skeleton_topology() -> Result<String, String> {
    // solid torus: skeleton must keep the loop, no endpoints
    let ring = ParametricCurve::circle(12.0, 400);
    let torus = tube_phantom(&ring, 2.0, 1.0).map_err(|e| e.to_string())?;
    let g = branch_decompose(&skeletonize(&torus), 3);
    if g.endpoint_count != 0 || g.cycle_count != 1 {
        return Err(format!(
            "torus skeleton: {} endpoints, {} cycles, want 0 and 1",
            g.endpoint_count, g.cycle_count
        ));
    }

    // Y of three 10-voxel arms: 3 branches around 1 junction
    let arm = 10usize;
    let c = arm + 1;
    let mut y = BinaryMask::empty((2 * arm + 3, 2 * arm + 3, 1), (1.0, 1.0, 1.0), (0.0, 0.0, 0.0));
    y.set(c, c, 0, true);
    for i in 1..=arm {
        y.set(c + i, c, 0, true);
        y.set(c - i, c, 0, true);
        y.set(c, c + i, 0, true);
    }
    let g = branch_decompose(&y, 1);
    if g.branch_count() != 3 || g.junction_count != 1 || g.endpoint_count != 3 {
        return Err(format!(
            "Y: {} branches, {} junctions, {} endpoints, want 3/1/3",
            g.branch_count(),
            g.junction_count,
            g.endpoint_count
        ));
    }

    // 2-voxel spur on a V: min_spur 3 removes it and the arms fuse
    let c = 11usize;
    let mut v = BinaryMask::empty((23, 23, 1), (1.0, 1.0, 1.0), (0.0, 0.0, 0.0));
    v.set(c, c, 0, true);
    for i in 1..=8 {
        v.set(c + i, c - i, 0, true);
        v.set(c - i, c - i, 0, true);
    }
    v.set(c, c + 1, 0, true);
    v.set(c, c + 2, 0, true);
    let g = branch_decompose(&v, 3);
    if g.branch_count() != 1 || g.junction_count != 0 {
        return Err(format!(
            "spur suppression: {} branches, {} junctions, want 1/0",
            g.branch_count(),
            g.junction_count
        ));
    }
    Ok("torus 1 cycle, Y 3 branches / 1 junction, 2-voxel spur pruned at min_spur 3".into())
}

fn shape_sphericity_and_scale() -> Result<String, String> {
    let (_, ball) = ellipsoid_phantom((20.0, 20.0, 20.0), 1.0, 1.0, 0.0)
        .map_err(|e| e.to_string())?;
    let f = shape_features(&ball).map_err(|e| e.to_string())?;
    for id in ["shape_Sphericity", "shape_Elongation", "shape_Flatness"] {
        let v = f.get(id).unwrap();
        if (v - 1.0).abs() > 0.03 {
            return Err(format!("r=20 ball {id} = {v}, want 1.00 +/- 0.03"));
        }
    }
    // same ellipsoid at doubled scale and voxel size: shape must not move
    let (_, small) = ellipsoid_phantom((10.0, 7.0, 4.0), 0.5, 1.0, 0.0)
        .map_err(|e| e.to_string())?;
    let (_, large) = ellipsoid_phantom((20.0, 14.0, 8.0), 1.0, 1.0, 0.0)
        .map_err(|e| e.to_string())?;
    let fs = shape_features(&small).map_err(|e| e.to_string())?;
    let fl = shape_features(&large).map_err(|e| e.to_string())?;
    for id in ["shape_Sphericity", "shape_Elongation", "shape_Flatness"] {
        let (a, b) = (fs.get(id).unwrap(), fl.get(id).unwrap());
        if (a - b).abs() > 0.03 {
            return Err(format!("scale invariance {id}: {a} vs {b}, want within 0.03"));
        }
    }
    let s = f.get("shape_Sphericity").unwrap();
    Ok(format!("r=20 ball sphericity {s:.3}; 2x-scaled ellipsoid shifts < 0.03"))
}

fn roc_auc_hand_case() -> Result<String, String> {
    let scores = [0.1, 0.4, 0.35, 0.8];
    let labels = [false, false, true, true];
    let auc = roc_auc(&scores, &labels).map_err(|e| e.to_string())?;
    if auc != 0.75 {
        return Err(format!("hand case AUC {auc}, want exactly 0.75"));
    }
    // any strictly monotone transform leaves rank AUC unchanged
    let warped: Vec<f64> = scores.iter().map(|&s| (3.0 * s).exp() + 7.0).collect();
    let auc_w = roc_auc(&warped, &labels).map_err(|e| e.to_string())?;
    if auc_w != auc {
        return Err(format!("monotone transform changed AUC: {auc} -> {auc_w}"));
    }
    // trapezoid area under the ROC polyline equals the pairwise statistic
    let pts = roc_points(&scores, &labels).map_err(|e| e.to_string())?;
    let area: f64 = pts
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum();
    if (area - auc).abs() > 1e-12 {
        return Err(format!("trapezoid area {area} != pairwise AUC {auc}"));
    }
    Ok("AUC 0.75 exact, transform-invariant, trapezoid-consistent".into())
}

// ------------------------------------------------------ speed and CLI

/// 64^3 scene: air background, speckled lesion ball, bright vessel tube
/// touching the lesion, lung covering everything.
fn synthetic_scene(dir: &Path) -> Result<std::path::PathBuf, String> {
    let dims = (64usize, 64usize, 64usize);
    let mut v = ScalarVolume::filled(dims, (1.0, 1.0, 1.0), (0.0, 0.0, 0.0), -800.0);
    let mut lesion = BinaryMask::like(&v);
    let mut lung = BinaryMask::like(&v);
    lung.data.fill(true);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for z in 0..64 {
        for y in 0..64 {
            for x in 0..64 {
                let r2 = (x as f64 - 32.0).powi(2)
                    + (y as f64 - 32.0).powi(2)
                    + (z as f64 - 32.0).powi(2);
                if r2 <= 100.0 {
                    let i = v.index(x, y, z);
                    v.data[i] = -100.0 + rng.gen_range(-30.0..30.0);
                    lesion.data[i] = true;
                }
            }
        }
    }
    for x in 10..54 {
        for y in [31usize, 32] {
            for z in [43usize, 44] {
                let i = v.index(x, y, z);
                v.data[i] = 200.0;
            }
        }
    }
    radqvt::volume::write_volume(&v, &dir.join("vol.mhd")).map_err(|e| e.to_string())?;
    radqvt::volume::write_mask(&lesion, &dir.join("les.mhd")).map_err(|e| e.to_string())?;
    radqvt::volume::write_mask(&lung, &dir.join("lung.mhd")).map_err(|e| e.to_string())?;
    let manifest = dir.join("manifest.csv");
    let mut text = String::from(
        "lesion_id,patient_id,timepoint,volume_path,lesion_mask_path,lung_mask_path\n",
    );
    for tp in 0..2 {
        text.push_str(&format!("les0001,p01,{tp},vol.mhd,les.mhd,lung.mhd\n"));
    }
    fs::write(&manifest, text).map_err(|e| e.to_string())?;
    Ok(manifest)
}

fn single_roi_extraction_speed() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = synthetic_scene(dir.path())?;
    let config = PipelineConfig {
        target_spacing_mm: 1.0,
        vessel_threshold_hu: Some(0.0),
        ..Default::default()
    };
    let t0 = Instant::now();
    let out = extract(&manifest, &config, Profile::Both).map_err(|e| e.to_string())?;
    let dt = t0.elapsed().as_secs_f64();
    if !out.failures.is_empty() {
        return Err(format!("extraction failed: {:?}", out.failures));
    }
    if out.rows.len() != 1 || out.rows[0].values.len() != 460 {
        return Err(format!(
            "got {} rows x {} values, want 1 x 460",
            out.rows.len(),
            out.rows.first().map_or(0, |r| r.values.len())
        ));
    }
    if dt >= 5.0 {
        return Err(format!("64^3 two-timepoint extraction took {dt:.2}s, budget 5s"));
    }
    Ok(format!("64^3 ROI, 460 columns in {dt:.2}s"))
}

fn run(exe: &str, args: &[&str]) -> Result<(), String> {
    let out = Command::new(exe).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "`{}` exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(())
}

fn cli_determinism() -> Result<String, String> {
    let exe = env!("CARGO_BIN_EXE_radqvt");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = dir.path().join("data");
    run(exe, &["phantom", "make-dataset", "--n", "20", "--seed", "3", "--out",
        data.to_str().unwrap()])?;
    let config = dir.path().join("config.json");
    fs::write(&config, "{}").map_err(|e| e.to_string())?;
    let manifest = data.join("manifest.csv");

    let f1 = dir.path().join("run1.csv");
    let f2 = dir.path().join("run2.csv");
    for f in [&f1, &f2] {
        run(exe, &["extract", "--manifest", manifest.to_str().unwrap(), "--config",
            config.to_str().unwrap(), "--out", f.to_str().unwrap()])?;
    }
    let (b1, b2) = (
        fs::read(&f1).map_err(|e| e.to_string())?,
        fs::read(&f2).map_err(|e| e.to_string())?,
    );
    if b1 != b2 {
        return Err("repeated extract runs produced different bytes".into());
    }

    let d1 = dir.path().join("cv1");
    let d2 = dir.path().join("cv2");
    for d in [&d1, &d2] {
        run(exe, &["cv", "--features", f1.to_str().unwrap(), "--model", "rf", "--k", "5",
            "--seed", "11", "--out", d.to_str().unwrap()])?;
    }
    for name in ["cv_report.json", "roc.csv", "importance.csv"] {
        let a = fs::read(d1.join(name)).map_err(|e| e.to_string())?;
        let b = fs::read(d2.join(name)).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("repeated cv runs differ in {name}"));
        }
    }
    Ok(format!("extract and cv byte-identical across reruns ({} byte CSV)", b1.len()))
}

// ----------------------------------------------------------- end to end

const TEXTURE_FAMILIES: [&str; 5] = ["glcm_", "glrlm_", "glszm_", "gldm_", "ngtdm_"];

fn is_tp2_texture(name: &str) -> bool {
    name.ends_with("_TP2") && TEXTURE_FAMILIES.iter().any(|f| name.starts_with(f))
}

fn subset_by_suffix(data: &Dataset, suffix: &str) -> Result<Dataset, String> {
    let idx: Vec<usize> = data
        .feature_names
        .iter()
        .enumerate()
        .filter(|(_, n)| n.ends_with(suffix))
        .map(|(i, _)| i)
        .collect();
    let names: Vec<String> = idx.iter().map(|&i| data.feature_names[i].clone()).collect();
    let rows: Vec<Vec<f64>> = data
        .rows
        .iter()
        .map(|r| idx.iter().map(|&i| r[i]).collect())
        .collect();
    Dataset::new(names, rows, data.labels.clone(), data.groups.clone())
        .map_err(|e| e.to_string())
}

fn end_to_end_planted_cohort() -> Result<String, String> {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = PlantedConfig {
        n_lesions: 200,
        seed: 7,
        ..Default::default()
    };
    planted_dataset(dir.path(), &cfg).map_err(|e| e.to_string())?;

    let config = PipelineConfig::default();
    let out = extract(&dir.path().join("manifest.csv"), &config, Profile::Both)
        .map_err(|e| e.to_string())?;
    if !out.failures.is_empty() {
        return Err(format!("{} lesions failed extraction: {:?}", out.failures.len(),
            &out.failures[..out.failures.len().min(3)]));
    }
    if out.rows.len() != 200 {
        return Err(format!("extracted {} rows, want 200", out.rows.len()));
    }
    let csv = dir.path().join("features.csv");
    write_feature_csv(&csv, &out).map_err(|e| e.to_string())?;
    let (data, _) = read_feature_csv(&csv).map_err(|e| e.to_string())?;

    let rf = RfParams::default();
    let gb = GbParams::default();
    let report = kfold_cv(&data, ModelKind::RandomForest, 5, 0, &rf, &gb)
        .map_err(|e| e.to_string())?;
    if report.mean_auc < 0.85 {
        return Err(format!("random-forest 5-fold mean AUC {:.3}, want >= 0.85", report.mean_auc));
    }

    // a follow-up texture feature must matter to both model families
    let rf_model = train_random_forest(&data, &rf).map_err(|e| e.to_string())?;
    let gb_model = train_gradient_boosting(&data, &gb).map_err(|e| e.to_string())?;
    for (tag, model) in [("rf", &rf_model), ("gb", &gb_model)] {
        let top: Vec<String> = model
            .ranked_importance()
            .into_iter()
            .take(5)
            .map(|(n, _)| n)
            .collect();
        if !top.iter().any(|n| is_tp2_texture(n)) {
            return Err(format!("{tag} top-5 importance has no follow-up texture feature: {top:?}"));
        }
    }

    // follow-up-only features must beat baseline-only features
    let tp1 = subset_by_suffix(&data, "_TP1")?;
    let tp2 = subset_by_suffix(&data, "_TP2")?;
    let auc1 = kfold_cv(&tp1, ModelKind::RandomForest, 5, 0, &rf, &gb)
        .map_err(|e| e.to_string())?
        .mean_auc;
    let auc2 = kfold_cv(&tp2, ModelKind::RandomForest, 5, 0, &rf, &gb)
        .map_err(|e| e.to_string())?
        .mean_auc;
    if auc2 <= auc1 {
        return Err(format!("follow-up profile AUC {auc2:.3} <= baseline profile AUC {auc1:.3}"));
    }

    let dt = t0.elapsed().as_secs_f64();
    if dt >= 600.0 {
        return Err(format!("end-to-end run took {dt:.0}s, budget 600s"));
    }
    Ok(format!(
        "200 lesions, mean AUC {:.3}, tp2 {auc2:.3} > tp1 {auc1:.3}, {dt:.0}s",
        report.mean_auc
    ))
}
