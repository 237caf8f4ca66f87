//! Manifest-driven batch feature extraction and the feature-table format
//! shared by the CLI subcommands.
//!
//! Per lesion and timepoint: resample to isotropic grid (trilinear for
//! intensities, nearest for masks), extract the 93-feature radiomic block
//! on the lesion (L) and its outer boundary band (B), segment the
//! lesion-attached vessel tree and extract 34 tortuosity + 10 fractal
//! features. Columns are `{feature}_{roi}_TP{n}` for radiomics and
//! `{feature}_TP{n}` for vessel features: 230 per timepoint, 460 for the
//! two-timepoint profile. Labels come from RECIST diameters on the native
//! (unresampled) lesion masks.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{catalog_ids, roi_feature_block, FeatureError};
use crate::ml::{Dataset, MlError};
use crate::roi::{boundary_band, recist_diameter, shrinkage_label, DiameterRecord, RoiError};
use crate::vessel::{
    branch_decompose, fractal_dimensions, lesion_attached_tree, qvt_features, segment_vessels,
    skeletonize, VesselError, VesselThreshold, FRACTAL_IDS, QVT_IDS,
};
use crate::volume::{
    read_mask, read_volume, resample_isotropic, resample_mask_nearest, VolumeError,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    ConfigParse(String),
    #[error("manifest line {line}: {msg}")]
    ManifestParse { line: usize, msg: String },
    #[error("lesion {0} is missing a timepoint")]
    MissingTimepoint(String),
    #[error("no lesions could be extracted")]
    NoRows,
    #[error("feature table: {0}")]
    TableParse(String),
    #[error(transparent)]
    Volume(#[from] VolumeError),
    #[error(transparent)]
    Roi(#[from] RoiError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Vessel(#[from] VesselError),
    #[error(transparent)]
    Ml(#[from] MlError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub bin_width: f64,
    pub target_spacing_mm: f64,
    pub band_margin_mm: f64,
    /// fixed vessel HU threshold; omit to pick one per volume by Otsu
    pub vessel_threshold_hu: Option<f64>,
    pub min_spur: usize,
    pub seed: u64,
    pub rf_trees: usize,
    pub rf_min_leaf: usize,
    pub gb_stages: usize,
    pub gb_depth: usize,
    pub gb_learning_rate: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            bin_width: 25.0,
            target_spacing_mm: 0.75,
            band_margin_mm: 2.0,
            vessel_threshold_hu: None,
            min_spur: 3,
            seed: 0,
            rf_trees: 300,
            rf_min_leaf: 2,
            gb_stages: 200,
            gb_depth: 3,
            gb_learning_rate: 0.1,
        }
    }
}

pub fn load_config(path: &Path) -> Result<PipelineConfig, PipelineError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| PipelineError::ConfigParse(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Both,
    Tp1,
    Tp2,
}

impl Profile {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "both" => Some(Self::Both),
            "tp1" => Some(Self::Tp1),
            "tp2" => Some(Self::Tp2),
            _ => None,
        }
    }

    fn timepoints(self) -> &'static [u32] {
        match self {
            Self::Both => &[0, 1],
            Self::Tp1 => &[0],
            Self::Tp2 => &[1],
        }
    }
}

#[derive(Debug, Clone)]
pub struct ManifestEntry {
    pub lesion_id: String,
    pub patient_id: String,
    pub timepoint: u32,
    pub volume_path: PathBuf,
    pub lesion_mask_path: PathBuf,
    pub lung_mask_path: PathBuf,
}

const MANIFEST_HEADER: &str =
    "lesion_id,patient_id,timepoint,volume_path,lesion_mask_path,lung_mask_path";

/// Parse the manifest CSV; relative paths are resolved against the
/// manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, PipelineError> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == MANIFEST_HEADER => {}
        Some((_, h)) => {
            return Err(PipelineError::ManifestParse {
                line: 1,
                msg: format!("unexpected header {h:?}"),
            })
        }
        None => {
            return Err(PipelineError::ManifestParse { line: 1, msg: "empty file".into() })
        }
    }
    let resolve = |s: &str| -> PathBuf {
        let p = Path::new(s);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(PipelineError::ManifestParse {
                line: i + 1,
                msg: format!("expected 6 fields, got {}", f.len()),
            });
        }
        let timepoint: u32 = f[2].trim().parse().map_err(|_| PipelineError::ManifestParse {
            line: i + 1,
            msg: format!("bad timepoint {:?}", f[2]),
        })?;
        out.push(ManifestEntry {
            lesion_id: f[0].trim().to_string(),
            patient_id: f[1].trim().to_string(),
            timepoint,
            volume_path: resolve(f[3].trim()),
            lesion_mask_path: resolve(f[4].trim()),
            lung_mask_path: resolve(f[5].trim()),
        });
    }
    Ok(out)
}

/// Column names for a profile, in output order.
pub fn feature_columns(profile: Profile) -> Vec<String> {
    let radiomic = catalog_ids();
    let mut cols = Vec::new();
    for &tp in profile.timepoints() {
        let n = tp + 1;
        for roi in ["L", "B"] {
            for id in &radiomic {
                cols.push(format!("{id}_{roi}_TP{n}"));
            }
        }
        for id in QVT_IDS {
            cols.push(format!("{id}_TP{n}"));
        }
        for id in FRACTAL_IDS {
            cols.push(format!("{id}_TP{n}"));
        }
    }
    cols
}

#[derive(Debug, Clone)]
pub struct LesionRow {
    pub lesion_id: String,
    pub patient_id: String,
    /// 1 when the lesion shrank past the RECIST threshold
    pub label: u8,
    pub values: Vec<f64>,
}

#[derive(Debug)]
pub struct ExtractOutput {
    pub columns: Vec<String>,
    pub rows: Vec<LesionRow>,
    /// (lesion_id, error) for lesions skipped by failure isolation
    pub failures: Vec<(String, String)>,
}

/// One timepoint's 230 values, in column order.
fn timepoint_block(
    entry: &ManifestEntry,
    config: &PipelineConfig,
) -> Result<Vec<f64>, PipelineError> {
    let volume = read_volume(&entry.volume_path)?;
    let lesion = read_mask(&entry.lesion_mask_path)?;
    let lung = read_mask(&entry.lung_mask_path)?;

    let v = resample_isotropic(&volume, config.target_spacing_mm)?;
    let lesion = resample_mask_nearest(&lesion, config.target_spacing_mm)?;
    let lung = resample_mask_nearest(&lung, config.target_spacing_mm)?;

    let mut values = Vec::with_capacity(230);
    values.extend(roi_feature_block(&v, &lesion, config.bin_width)?.values());
    let band = boundary_band(&lesion, config.band_margin_mm)?;
    values.extend(roi_feature_block(&v, &band, config.bin_width)?.values());

    let mode = match config.vessel_threshold_hu {
        Some(t) => VesselThreshold::Fixed(t),
        None => VesselThreshold::Otsu,
    };
    let vessels = segment_vessels(&v, &lung, mode)?;
    let tree = lesion_attached_tree(&vessels, &lesion);
    let graph = branch_decompose(&skeletonize(&tree), config.min_spur);
    values.extend(qvt_features(&graph, &tree).values());
    values.extend(fractal_dimensions(&tree).values());
    Ok(values)
}

fn lesion_label(entries: &BTreeMap<u32, &ManifestEntry>) -> Result<u8, PipelineError> {
    let mut records = Vec::new();
    for (&tp, e) in entries {
        let mask = read_mask(&e.lesion_mask_path)?;
        records.push(DiameterRecord {
            lesion_id: e.lesion_id.clone(),
            timepoint: tp,
            diameter_mm: recist_diameter(&mask),
        });
    }
    Ok(shrinkage_label(&records[0], &records[1..])?)
}

/// Extract every lesion in the manifest. Lesions that fail are recorded
/// and skipped; rows come back sorted by lesion id.
pub fn extract(
    manifest_path: &Path,
    config: &PipelineConfig,
    profile: Profile,
) -> Result<ExtractOutput, PipelineError> {
    let entries = read_manifest(manifest_path)?;
    let mut by_lesion: BTreeMap<&str, BTreeMap<u32, &ManifestEntry>> = BTreeMap::new();
    for e in &entries {
        by_lesion.entry(&e.lesion_id).or_default().insert(e.timepoint, e);
    }

    let columns = feature_columns(profile);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (lesion_id, tps) in &by_lesion {
        let result = (|| -> Result<LesionRow, PipelineError> {
            // the label always needs both timepoints, whatever the profile
            if !tps.contains_key(&0) || !tps.contains_key(&1) {
                return Err(PipelineError::MissingTimepoint(lesion_id.to_string()));
            }
            let label = lesion_label(tps)?;
            let mut values = Vec::with_capacity(columns.len());
            for tp in profile.timepoints() {
                values.extend(timepoint_block(tps[tp], config)?);
            }
            debug_assert_eq!(values.len(), columns.len());
            Ok(LesionRow {
                lesion_id: lesion_id.to_string(),
                patient_id: tps[&0].patient_id.clone(),
                label,
                values,
            })
        })();
        match result {
            Ok(row) => rows.push(row),
            Err(e) => failures.push((lesion_id.to_string(), e.to_string())),
        }
    }
    if rows.is_empty() {
        return Err(PipelineError::NoRows);
    }
    Ok(ExtractOutput { columns, rows, failures })
}

/// Serialize the feature table; floats carry 17 significant digits so the
/// round trip is value-exact.
pub fn write_feature_csv(path: &Path, out: &ExtractOutput) -> Result<(), PipelineError> {
    let mut text = String::from("lesion_id,patient_id,label");
    for c in &out.columns {
        text.push(',');
        text.push_str(c);
    }
    text.push('\n');
    for row in &out.rows {
        text.push_str(&format!("{},{},{}", row.lesion_id, row.patient_id, row.label));
        for v in &row.values {
            text.push_str(&format!(",{v:.16e}"));
        }
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Read a feature table back as an ML dataset (groups = patient ids)
/// plus the lesion ids in row order.
pub fn read_feature_csv(path: &Path) -> Result<(Dataset, Vec<String>), PipelineError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| PipelineError::TableParse("empty file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 4 || cols[0] != "lesion_id" || cols[1] != "patient_id" || cols[2] != "label" {
        return Err(PipelineError::TableParse(format!("unexpected header {header:?}")));
    }
    let feature_names: Vec<String> = cols[3..].iter().map(|s| s.to_string()).collect();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    let mut lesion_ids = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != cols.len() {
            return Err(PipelineError::TableParse(format!(
                "row {}: {} fields, expected {}",
                i + 2,
                f.len(),
                cols.len()
            )));
        }
        lesion_ids.push(f[0].to_string());
        groups.push(f[1].to_string());
        labels.push(match f[2] {
            "1" => true,
            "0" => false,
            other => {
                return Err(PipelineError::TableParse(format!(
                    "row {}: bad label {other:?}",
                    i + 2
                )))
            }
        });
        let mut vals = Vec::with_capacity(feature_names.len());
        for s in &f[3..] {
            vals.push(s.parse::<f64>().map_err(|_| {
                PipelineError::TableParse(format!("row {}: bad value {s:?}", i + 2))
            })?);
        }
        rows.push(vals);
    }
    let dataset = Dataset::new(feature_names, rows, labels, groups)?;
    Ok((dataset, lesion_ids))
}
