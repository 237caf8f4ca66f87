//! Synthetic ground-truth generators: ellipsoid lesions, parametric-curve
//! tubes with analytic tortuosity/curvature, and the planted-signal dataset
//! used for the end-to-end experiment.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::roi::recist_diameter;
use crate::volume::{write_mask, write_volume_typed, BinaryMask, ElementType, ScalarVolume, VolumeError};

#[derive(Debug, Error)]
pub enum PhantomError {
    #[error("semi-axes too small for spacing (need > 2 * spacing)")]
    TooSmall,
    #[error("tube curve approaches itself closer than 2 * radius")]
    SelfIntersection,
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("volume error: {0}")]
    Volume(#[from] VolumeError),
}

/// Sampled closed-form curve with its analytic invariants.
#[derive(Debug, Clone)]
pub struct ParametricCurve {
    pub points: Vec<(f64, f64, f64)>,
    pub arc_length_mm: f64,
    pub chord_mm: f64,
    /// Constant analytic curvature (0 for a line).
    pub curvature_per_mm: f64,
}

impl ParametricCurve {
    pub fn line(length_mm: f64, n: usize) -> Self {
        let points = (0..n)
            .map(|i| (length_mm * i as f64 / (n - 1) as f64, 0.0, 0.0))
            .collect();
        Self {
            points,
            arc_length_mm: length_mm,
            chord_mm: length_mm,
            curvature_per_mm: 0.0,
        }
    }

    /// Planar circle arc of `angle_rad` radians; a semicircle is PI.
    pub fn circle_arc(radius_mm: f64, angle_rad: f64, n: usize) -> Self {
        let points = (0..n)
            .map(|i| {
                let t = angle_rad * i as f64 / (n - 1) as f64;
                (radius_mm * t.cos(), radius_mm * t.sin(), 0.0)
            })
            .collect();
        Self {
            points,
            arc_length_mm: radius_mm * angle_rad,
            chord_mm: 2.0 * radius_mm * (angle_rad / 2.0).sin(),
            curvature_per_mm: 1.0 / radius_mm,
        }
    }

    /// Full circle (closed ring), for torus phantoms.
    pub fn circle(radius_mm: f64, n: usize) -> Self {
        let points = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                (radius_mm * t.cos(), radius_mm * t.sin(), 0.0)
            })
            .collect();
        Self {
            points,
            arc_length_mm: 2.0 * std::f64::consts::PI * radius_mm,
            chord_mm: 0.0,
            curvature_per_mm: 1.0 / radius_mm,
        }
    }

    /// Helix x = R cos t, y = R sin t, z = b t; curvature R / (R^2 + b^2).
    pub fn helix(radius_mm: f64, pitch_b: f64, turns: f64, n: usize) -> Self {
        let t_max = 2.0 * std::f64::consts::PI * turns;
        let points: Vec<_> = (0..n)
            .map(|i| {
                let t = t_max * i as f64 / (n - 1) as f64;
                (radius_mm * t.cos(), radius_mm * t.sin(), pitch_b * t)
            })
            .collect();
        let chord = {
            let a = points[0];
            let b = points[n - 1];
            ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2) + (a.2 - b.2).powi(2)).sqrt()
        };
        Self {
            points,
            arc_length_mm: (radius_mm * radius_mm + pitch_b * pitch_b).sqrt() * t_max,
            chord_mm: chord,
            curvature_per_mm: radius_mm / (radius_mm * radius_mm + pitch_b * pitch_b),
        }
    }

    /// Whether the curve closes on itself (ring).
    pub fn is_closed(&self) -> bool {
        let a = self.points[0];
        let b = *self.points.last().unwrap();
        let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2) + (a.2 - b.2).powi(2)).sqrt();
        d < 1e-9 || self.chord_mm == 0.0
    }
}

/// Ellipsoid mask + two-intensity volume; mask voxels satisfy the ellipsoid
/// inequality at their centers.
pub fn ellipsoid_phantom(
    semi_axes: (f64, f64, f64),
    spacing: f64,
    intensity_in: f64,
    intensity_out: f64,
) -> Result<(ScalarVolume, BinaryMask), PhantomError> {
    let (a, b, c) = semi_axes;
    if a <= 2.0 * spacing || b <= 2.0 * spacing || c <= 2.0 * spacing {
        return Err(PhantomError::TooSmall);
    }
    let margin = 3.0 * spacing;
    let dims = (
        (2.0 * (a + margin) / spacing).ceil() as usize + 1,
        (2.0 * (b + margin) / spacing).ceil() as usize + 1,
        (2.0 * (c + margin) / spacing).ceil() as usize + 1,
    );
    let center = (
        (dims.0 - 1) as f64 / 2.0,
        (dims.1 - 1) as f64 / 2.0,
        (dims.2 - 1) as f64 / 2.0,
    );
    let sp = (spacing, spacing, spacing);
    let mut v = ScalarVolume::filled(dims, sp, (0.0, 0.0, 0.0), intensity_out);
    let mut m = BinaryMask::like(&v);
    for z in 0..dims.2 {
        for y in 0..dims.1 {
            for x in 0..dims.0 {
                let dx = (x as f64 - center.0) * spacing / a;
                let dy = (y as f64 - center.1) * spacing / b;
                let dz = (z as f64 - center.2) * spacing / c;
                if dx * dx + dy * dy + dz * dz <= 1.0 {
                    let i = v.index(x, y, z);
                    v.data[i] = intensity_in;
                    m.data[i] = true;
                }
            }
        }
    }
    Ok((v, m))
}

/// Ellipsoid with a seeded two-level speckle interior (strong zone-entropy
/// signal for the planted dataset).
pub fn speckled_ellipsoid(
    semi_axes: (f64, f64, f64),
    spacing: f64,
    mean_in: f64,
    amplitude: f64,
    intensity_out: f64,
    seed: u64,
) -> (ScalarVolume, BinaryMask) {
    let (mut v, m) = ellipsoid_phantom(semi_axes, spacing, mean_in, intensity_out)
        .expect("speckled_ellipsoid axes too small");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (i, &inside) in m.data.iter().enumerate() {
        if inside {
            let level = if rng.gen_bool(0.5) { amplitude } else { -amplitude };
            v.data[i] = mean_in + level + rng.gen_range(-2.0..2.0);
        }
    }
    (v, m)
}

/// Voxelize a tube of `radius_mm` around the sampled curve.
pub fn tube_phantom(
    curve: &ParametricCurve,
    radius_mm: f64,
    spacing: f64,
) -> Result<BinaryMask, PhantomError> {
    check_self_distance(curve, radius_mm)?;
    let margin = radius_mm + 2.0 * spacing;
    let (mut lo, mut hi) = (
        (f64::INFINITY, f64::INFINITY, f64::INFINITY),
        (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
    );
    for p in &curve.points {
        lo = (lo.0.min(p.0), lo.1.min(p.1), lo.2.min(p.2));
        hi = (hi.0.max(p.0), hi.1.max(p.1), hi.2.max(p.2));
    }
    let dims = (
        ((hi.0 - lo.0 + 2.0 * margin) / spacing).ceil() as usize + 1,
        ((hi.1 - lo.1 + 2.0 * margin) / spacing).ceil() as usize + 1,
        ((hi.2 - lo.2 + 2.0 * margin) / spacing).ceil() as usize + 1,
    );
    let shift = (lo.0 - margin, lo.1 - margin, lo.2 - margin);
    let pts: Vec<(f64, f64, f64)> = curve
        .points
        .iter()
        .map(|p| (p.0 - shift.0, p.1 - shift.1, p.2 - shift.2))
        .collect();
    let mut m = BinaryMask::empty(dims, (spacing, spacing, spacing), (0.0, 0.0, 0.0));
    // only voxels near some sample can be inside the tube
    let reach = radius_mm + spacing;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let x0 = (((a.0.min(b.0) - reach) / spacing).floor().max(0.0)) as usize;
        let y0 = (((a.1.min(b.1) - reach) / spacing).floor().max(0.0)) as usize;
        let z0 = (((a.2.min(b.2) - reach) / spacing).floor().max(0.0)) as usize;
        let x1 = ((((a.0.max(b.0) + reach) / spacing).ceil()) as usize).min(dims.0 - 1);
        let y1 = ((((a.1.max(b.1) + reach) / spacing).ceil()) as usize).min(dims.1 - 1);
        let z1 = ((((a.2.max(b.2) + reach) / spacing).ceil()) as usize).min(dims.2 - 1);
        for z in z0..=z1 {
            for y in y0..=y1 {
                for x in x0..=x1 {
                    if m.get(x, y, z) {
                        continue;
                    }
                    let p = (x as f64 * spacing, y as f64 * spacing, z as f64 * spacing);
                    if point_segment_dist(p, a, b) <= radius_mm {
                        m.set(x, y, z, true);
                    }
                }
            }
        }
    }
    Ok(m)
}

fn point_segment_dist(p: (f64, f64, f64), a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
    let ab = (b.0 - a.0, b.1 - a.1, b.2 - a.2);
    let ap = (p.0 - a.0, p.1 - a.1, p.2 - a.2);
    let len2 = ab.0 * ab.0 + ab.1 * ab.1 + ab.2 * ab.2;
    let t = if len2 > 0.0 {
        ((ap.0 * ab.0 + ap.1 * ab.1 + ap.2 * ab.2) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = (a.0 + t * ab.0, a.1 + t * ab.1, a.2 + t * ab.2);
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2) + (p.2 - q.2).powi(2)).sqrt()
}

fn check_self_distance(curve: &ParametricCurve, radius_mm: f64) -> Result<(), PhantomError> {
    let pts = &curve.points;
    let n = pts.len();
    // cumulative geodesic distance
    let mut cum = vec![0.0; n];
    for i in 1..n {
        let (a, b) = (pts[i - 1], pts[i]);
        cum[i] = cum[i - 1]
            + ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2) + (a.2 - b.2).powi(2)).sqrt();
    }
    let closed = curve.is_closed();
    let total = cum[n - 1];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut geo = cum[j] - cum[i];
            if closed {
                geo = geo.min(total - geo);
            }
            if geo <= 3.0 * radius_mm {
                continue;
            }
            let (a, b) = (pts[i], pts[j]);
            let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2) + (a.2 - b.2).powi(2)).sqrt();
            if d <= 2.0 * radius_mm {
                return Err(PhantomError::SelfIntersection);
            }
        }
    }
    Ok(())
}

/// Parameters of [`planted_dataset`].
#[derive(Debug, Clone)]
pub struct PlantedConfig {
    pub n_lesions: usize,
    pub seed: u64,
    /// Probability that a lesion's texture class and its shrinkage disagree.
    pub label_noise: f64,
    pub spacing: f64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            n_lesions: 200,
            seed: 7,
            label_noise: 0.05,
            spacing: 1.0,
        }
    }
}

/// Generate the planted-signal two-timepoint dataset under `dir`:
/// per-lesion volume/lesion-mask/lung-mask files for TP 0 and 1, a
/// `manifest.csv` the extract CLI consumes, and a `diameters.csv` with the
/// realized RECIST diameters. Follow-up texture (speckled vs uniform
/// interior) carries the shrinkage signal, with `label_noise` mismatches.
pub fn planted_dataset(dir: &Path, cfg: &PlantedConfig) -> Result<(), PhantomError> {
    fs::create_dir_all(dir)?;
    let mut manifest = String::from(
        "lesion_id,patient_id,timepoint,volume_path,lesion_mask_path,lung_mask_path\n",
    );
    let mut diameters = String::from("lesion_id,patient_id,timepoint,diameter_mm\n");
    for idx in 0..cfg.n_lesions {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9e3779b9).wrapping_add(idx as u64));
        let lesion_id = format!("les{idx:04}");
        let patient_id = format!("pat{:04}", idx / 2);
        let speckled = rng.gen_bool(0.5);
        let consistent = !rng.gen_bool(cfg.label_noise);
        let shrinks = speckled == consistent;
        let a = rng.gen_range(5.5..7.5);
        let b = rng.gen_range(5.0..7.0);
        let c = rng.gen_range(5.0..7.0);
        let factor = if shrinks {
            rng.gen_range(0.50..0.60)
        } else {
            rng.gen_range(0.85..0.95)
        };
        for tp in 0..2u32 {
            let axes = if tp == 0 {
                (a, b, c)
            } else {
                (factor * a, factor * b, factor * c)
            };
            let scene = build_lesion_scene(axes, speckled && tp == 1, cfg.spacing, &mut rng)?;
            let vol_p = dir.join(format!("{lesion_id}_tp{tp}_vol.mhd"));
            let les_p = dir.join(format!("{lesion_id}_tp{tp}_les.mhd"));
            let lung_p = dir.join(format!("{lesion_id}_tp{tp}_lung.mhd"));
            write_volume_typed(&scene.volume, &vol_p, ElementType::Short)?;
            write_mask(&scene.lesion, &les_p)?;
            write_mask(&scene.lung, &lung_p)?;
            manifest.push_str(&format!(
                "{lesion_id},{patient_id},{tp},{},{},{}\n",
                vol_p.file_name().unwrap().to_str().unwrap(),
                les_p.file_name().unwrap().to_str().unwrap(),
                lung_p.file_name().unwrap().to_str().unwrap(),
            ));
            diameters.push_str(&format!(
                "{lesion_id},{patient_id},{tp},{}\n",
                recist_diameter(&scene.lesion)
            ));
        }
    }
    let mut f = fs::File::create(dir.join("manifest.csv"))?;
    f.write_all(manifest.as_bytes())?;
    let mut f = fs::File::create(dir.join("diameters.csv"))?;
    f.write_all(diameters.as_bytes())?;
    Ok(())
}

struct LesionScene {
    volume: ScalarVolume,
    lesion: BinaryMask,
    lung: BinaryMask,
}

// Body at 0 HU, lung box at -850 HU, lesion ellipsoid at the center, one
// vessel tube of -100 HU touching the lesion surface.
fn build_lesion_scene(
    semi_axes: (f64, f64, f64),
    speckled: bool,
    spacing: f64,
    rng: &mut ChaCha8Rng,
) -> Result<LesionScene, PhantomError> {
    let n = 44usize;
    let dims = (n, n, n);
    let sp = (spacing, spacing, spacing);
    let mut volume = ScalarVolume::filled(dims, sp, (0.0, 0.0, 0.0), 0.0);
    let mut lung = BinaryMask::like(&volume);
    let lung_lo = 5usize;
    let lung_hi = n - 5;
    for z in lung_lo..lung_hi {
        for y in lung_lo..lung_hi {
            for x in lung_lo..lung_hi {
                let i = volume.index(x, y, z);
                volume.data[i] = -850.0 + rng.gen_range(-5.0..5.0);
                lung.data[i] = true;
            }
        }
    }
    let center = (n as f64 - 1.0) / 2.0;
    let mut lesion = BinaryMask::like(&volume);
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                let dx = (x as f64 - center) * spacing / semi_axes.0;
                let dy = (y as f64 - center) * spacing / semi_axes.1;
                let dz = (z as f64 - center) * spacing / semi_axes.2;
                if dx * dx + dy * dy + dz * dz <= 1.0 {
                    let i = volume.index(x, y, z);
                    lesion.data[i] = true;
                    volume.data[i] = if speckled {
                        let level = if rng.gen_bool(0.5) { 60.0 } else { -60.0 };
                        -100.0 + level + rng.gen_range(-2.0..2.0)
                    } else {
                        -100.0 + rng.gen_range(-4.0..4.0)
                    };
                }
            }
        }
    }
    // vessel tube from the lesion surface outward along a random axis-ish
    // direction, with a slight bend
    let dir_axis = rng.gen_range(0..3usize);
    let sign: f64 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let start = semi_axes.0.max(semi_axes.1).max(semi_axes.2) - 1.0;
    let reach = (n as f64 / 2.0 - 8.0) * spacing;
    let bend = rng.gen_range(-3.0..3.0);
    let n_samples = 60;
    for s in 0..n_samples {
        let t = s as f64 / (n_samples - 1) as f64;
        let along = start + t * (reach - start);
        let lateral = bend * t * t;
        let (px, py, pz) = match dir_axis {
            0 => (center * spacing + sign * along, center * spacing + lateral, center * spacing),
            1 => (center * spacing + lateral, center * spacing + sign * along, center * spacing),
            _ => (center * spacing, center * spacing + lateral, center * spacing + sign * along),
        };
        let r = 1.6 * spacing;
        let x0 = (((px - r) / spacing).floor().max(0.0)) as usize;
        let y0 = (((py - r) / spacing).floor().max(0.0)) as usize;
        let z0 = (((pz - r) / spacing).floor().max(0.0)) as usize;
        let x1 = ((((px + r) / spacing).ceil()) as usize).min(n - 1);
        let y1 = ((((py + r) / spacing).ceil()) as usize).min(n - 1);
        let z1 = ((((pz + r) / spacing).ceil()) as usize).min(n - 1);
        for z in z0..=z1 {
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let d = ((x as f64 * spacing - px).powi(2)
                        + (y as f64 * spacing - py).powi(2)
                        + (z as f64 * spacing - pz).powi(2))
                    .sqrt();
                    let i = volume.index(x, y, z);
                    if d <= r && lung.data[i] && !lesion.data[i] {
                        volume.data[i] = -100.0 + rng.gen_range(-5.0..5.0);
                    }
                }
            }
        }
    }
    Ok(LesionScene {
        volume,
        lesion,
        lung,
    })
}
