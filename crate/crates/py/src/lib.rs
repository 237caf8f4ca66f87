//! Python bindings: volumes, masks, the feature extractors, and the
//! batch pipeline. Feature vectors cross the boundary as plain dicts.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use radqvt::features::roi_feature_block;
use radqvt::phantom::{planted_dataset, PlantedConfig};
use radqvt::pipeline::{
    extract, load_config, write_feature_csv, PipelineConfig, Profile,
};
use radqvt::roi::{boundary_band, recist_diameter};
use radqvt::vessel::{
    branch_decompose, fractal_dimensions, lesion_attached_tree, qvt_features, segment_vessels,
    skeletonize, VesselThreshold,
};
use radqvt::volume::{
    read_mask, read_volume, resample_isotropic, resample_mask_nearest, write_mask,
    write_volume_typed, ElementType,
};
use radqvt::{BinaryMask, ScalarVolume};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn io_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyIOError::new_err(e.to_string())
}

/// Scalar CT volume on a regular grid (x varies fastest).
#[pyclass(name = "Volume", skip_from_py_object)]
#[derive(Clone)]
struct PyVolume {
    inner: ScalarVolume,
}

#[pymethods]
impl PyVolume {
    #[new]
    fn new(
        dims: (usize, usize, usize),
        spacing: (f64, f64, f64),
        origin: (f64, f64, f64),
        data: Vec<f64>,
    ) -> PyResult<Self> {
        ScalarVolume::new(dims, spacing, origin, data)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        read_volume(&path).map(|inner| Self { inner }).map_err(io_err)
    }

    #[pyo3(signature = (path, element_type="short"))]
    fn to_file(&self, path: PathBuf, element_type: &str) -> PyResult<()> {
        let et = match element_type {
            "short" => ElementType::Short,
            "float" => ElementType::Float,
            other => return Err(err(format!("unknown element type {other:?}"))),
        };
        write_volume_typed(&self.inner, &path, et).map_err(io_err)
    }

    #[getter]
    fn dims(&self) -> (usize, usize, usize) {
        self.inner.dims
    }

    #[getter]
    fn spacing(&self) -> (f64, f64, f64) {
        self.inner.spacing
    }

    #[getter]
    fn origin(&self) -> (f64, f64, f64) {
        self.inner.origin
    }

    #[getter]
    fn data(&self) -> Vec<f64> {
        self.inner.data.clone()
    }

    fn resample(&self, target_mm: f64) -> PyResult<Self> {
        resample_isotropic(&self.inner, target_mm)
            .map(|inner| Self { inner })
            .map_err(err)
    }
}

/// Boolean ROI mask sharing a volume's grid geometry.
#[pyclass(name = "Mask", skip_from_py_object)]
#[derive(Clone)]
struct PyMask {
    inner: BinaryMask,
}

#[pymethods]
impl PyMask {
    #[new]
    fn new(
        dims: (usize, usize, usize),
        spacing: (f64, f64, f64),
        origin: (f64, f64, f64),
        voxels: Vec<(usize, usize, usize)>,
    ) -> PyResult<Self> {
        let mut inner = BinaryMask::empty(dims, spacing, origin);
        for (x, y, z) in voxels {
            if x >= dims.0 || y >= dims.1 || z >= dims.2 {
                return Err(err(format!("voxel ({x},{y},{z}) outside {dims:?}")));
            }
            inner.set(x, y, z, true);
        }
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        read_mask(&path).map(|inner| Self { inner }).map_err(io_err)
    }

    fn to_file(&self, path: PathBuf) -> PyResult<()> {
        write_mask(&self.inner, &path).map_err(io_err)
    }

    #[getter]
    fn dims(&self) -> (usize, usize, usize) {
        self.inner.dims
    }

    #[getter]
    fn spacing(&self) -> (f64, f64, f64) {
        self.inner.spacing
    }

    fn count(&self) -> usize {
        self.inner.count()
    }

    fn foreground(&self) -> Vec<(usize, usize, usize)> {
        self.inner.foreground().collect()
    }

    fn resample(&self, target_mm: f64) -> PyResult<Self> {
        resample_mask_nearest(&self.inner, target_mm)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    fn band(&self, margin_mm: f64) -> PyResult<Self> {
        boundary_band(&self.inner, margin_mm)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    fn skeletonize(&self) -> Self {
        Self { inner: skeletonize(&self.inner) }
    }

    fn recist_diameter(&self) -> f64 {
        recist_diameter(&self.inner)
    }
}

/// The 93-feature radiomic block (shape, first-order, texture) on one ROI.
#[pyfunction]
#[pyo3(signature = (volume, roi, bin_width=25.0))]
fn roi_features(
    volume: &PyVolume,
    roi: &PyMask,
    bin_width: f64,
) -> PyResult<BTreeMap<String, f64>> {
    let fv = roi_feature_block(&volume.inner, &roi.inner, bin_width).map_err(err)?;
    Ok(fv.iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// 34 tortuosity + 10 fractal features of the lesion-attached vessel tree.
#[pyfunction]
#[pyo3(signature = (volume, lung, lesion, threshold_hu=None, min_spur=3))]
fn vessel_features(
    volume: &PyVolume,
    lung: &PyMask,
    lesion: &PyMask,
    threshold_hu: Option<f64>,
    min_spur: usize,
) -> PyResult<BTreeMap<String, f64>> {
    let mode = match threshold_hu {
        Some(t) => VesselThreshold::Fixed(t),
        None => VesselThreshold::Otsu,
    };
    let vessels = segment_vessels(&volume.inner, &lung.inner, mode).map_err(err)?;
    let tree = lesion_attached_tree(&vessels, &lesion.inner);
    let graph = branch_decompose(&skeletonize(&tree), min_spur);
    let mut out: BTreeMap<String, f64> = qvt_features(&graph, &tree)
        .iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    out.extend(fractal_dimensions(&tree).iter().map(|(k, v)| (k.to_string(), v)));
    Ok(out)
}

/// Run manifest-driven extraction and write the feature CSV; returns
/// (n_rows, n_columns, skipped lesion ids).
#[pyfunction]
#[pyo3(signature = (manifest, out, config=None, profile="both"))]
fn extract_to_csv(
    manifest: PathBuf,
    out: PathBuf,
    config: Option<PathBuf>,
    profile: &str,
) -> PyResult<(usize, usize, Vec<String>)> {
    let cfg = match config {
        Some(p) => load_config(&p).map_err(err)?,
        None => PipelineConfig::default(),
    };
    let profile = Profile::parse(profile)
        .ok_or_else(|| err(format!("unknown profile {profile:?}")))?;
    let result = extract(&manifest, &cfg, profile).map_err(err)?;
    write_feature_csv(&out, &result).map_err(io_err)?;
    Ok((
        result.rows.len(),
        result.columns.len(),
        result.failures.into_iter().map(|(id, _)| id).collect(),
    ))
}

/// Write the planted-signal synthetic dataset (volumes, masks, manifest).
#[pyfunction]
#[pyo3(signature = (out, n=200, seed=7))]
fn make_dataset(out: PathBuf, n: usize, seed: u64) -> PyResult<()> {
    planted_dataset(&out, &PlantedConfig { n_lesions: n, seed, ..Default::default() })
        .map_err(io_err)
}

#[pymodule]
fn radqvt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyVolume>()?;
    m.add_class::<PyMask>()?;
    m.add_function(wrap_pyfunction!(roi_features, m)?)?;
    m.add_function(wrap_pyfunction!(vessel_features, m)?)?;
    m.add_function(wrap_pyfunction!(extract_to_csv, m)?)?;
    m.add_function(wrap_pyfunction!(make_dataset, m)?)?;
    Ok(())
}
