//! Scalar volumes, binary masks, MetaImage-style IO, and isotropic resampling.
//!
//! Volumes are axis-aligned grids with x-fastest linear storage. Physical
//! coordinates of voxel `(i, j, k)` are `origin + (i*sx, j*sy, k*sz)`, i.e.
//! the origin is the center of voxel 0.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

const GEOM_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum VolumeError {
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing header field: {0}")]
    MissingHeaderField(String),
    #[error("malformed header field {field}: {value}")]
    MalformedHeaderField { field: String, value: String },
    #[error("unsupported element type: {0}")]
    UnsupportedElementType(String),
    #[error("data size mismatch: expected {expected} bytes, got {actual}")]
    DimsMismatch { expected: usize, actual: usize },
    #[error("non-positive resample target: {0}")]
    NonPositiveTarget(f64),
    #[error("geometry mismatch between volume and mask")]
    GeometryMismatch,
    #[error("invalid volume: {0}")]
    Invalid(String),
}

/// Raw on-disk element type of a volume payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementType {
    Short,
    Float,
}

impl ElementType {
    fn name(self) -> &'static str {
        match self {
            ElementType::Short => "MET_SHORT",
            ElementType::Float => "MET_FLOAT",
        }
    }

    fn byte_size(self) -> usize {
        match self {
            ElementType::Short => 2,
            ElementType::Float => 4,
        }
    }
}

/// 3D grid of intensities (HU) with physical spacing and origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarVolume {
    pub dims: (usize, usize, usize),
    pub spacing: (f64, f64, f64),
    pub origin: (f64, f64, f64),
    pub data: Vec<f64>,
}

/// Boolean grid sharing a companion volume's geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMask {
    pub dims: (usize, usize, usize),
    pub spacing: (f64, f64, f64),
    pub origin: (f64, f64, f64),
    pub data: Vec<bool>,
}

impl ScalarVolume {
    pub fn new(
        dims: (usize, usize, usize),
        spacing: (f64, f64, f64),
        origin: (f64, f64, f64),
        data: Vec<f64>,
    ) -> Result<Self, VolumeError> {
        let n = dims.0 * dims.1 * dims.2;
        if data.len() != n {
            return Err(VolumeError::Invalid(format!(
                "data length {} != {}x{}x{}",
                data.len(),
                dims.0,
                dims.1,
                dims.2
            )));
        }
        if spacing.0 <= 0.0 || spacing.1 <= 0.0 || spacing.2 <= 0.0 {
            return Err(VolumeError::Invalid("spacing must be positive".into()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(VolumeError::Invalid("non-finite intensity".into()));
        }
        Ok(Self {
            dims,
            spacing,
            origin,
            data,
        })
    }

    /// Filled volume, mainly for tests and phantoms.
    pub fn filled(
        dims: (usize, usize, usize),
        spacing: (f64, f64, f64),
        origin: (f64, f64, f64),
        value: f64,
    ) -> Self {
        let n = dims.0 * dims.1 * dims.2;
        Self {
            dims,
            spacing,
            origin,
            data: vec![value; n],
        }
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims.0 * (y + self.dims.1 * z)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.data[self.index(x, y, z)]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

impl BinaryMask {
    pub fn empty(
        dims: (usize, usize, usize),
        spacing: (f64, f64, f64),
        origin: (f64, f64, f64),
    ) -> Self {
        let n = dims.0 * dims.1 * dims.2;
        Self {
            dims,
            spacing,
            origin,
            data: vec![false; n],
        }
    }

    /// Empty mask with the geometry of `v`.
    pub fn like(v: &ScalarVolume) -> Self {
        Self::empty(v.dims, v.spacing, v.origin)
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims.0 * (y + self.dims.1 * z)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> bool {
        self.data[self.index(x, y, z)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, z: usize, v: bool) {
        let i = self.index(x, y, z);
        self.data[i] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_mask_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn same_geometry(&self, other: &BinaryMask) -> bool {
        self.dims == other.dims
            && geom_close(self.spacing, other.spacing)
            && geom_close(self.origin, other.origin)
    }

    pub fn matches_volume(&self, v: &ScalarVolume) -> bool {
        self.dims == v.dims && geom_close(self.spacing, v.spacing) && geom_close(self.origin, v.origin)
    }

    /// Iterator over foreground voxel coordinates.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let (nx, ny, _) = self.dims;
        self.data.iter().enumerate().filter(|(_, &b)| b).map(move |(i, _)| {
            let x = i % nx;
            let y = (i / nx) % ny;
            let z = i / (nx * ny);
            (x, y, z)
        })
    }

    /// Mask encoded as a 0/1 volume (for file storage).
    pub fn to_volume(&self) -> ScalarVolume {
        ScalarVolume {
            dims: self.dims,
            spacing: self.spacing,
            origin: self.origin,
            data: self.data.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }
}

fn geom_close(a: (f64, f64, f64), b: (f64, f64, f64)) -> bool {
    (a.0 - b.0).abs() <= GEOM_TOL && (a.1 - b.1).abs() <= GEOM_TOL && (a.2 - b.2).abs() <= GEOM_TOL
}

/// Voxel true iff intensity > threshold; geometry copied.
pub fn binarize_mask(v: &ScalarVolume, threshold: f64) -> BinaryMask {
    BinaryMask {
        dims: v.dims,
        spacing: v.spacing,
        origin: v.origin,
        data: v.data.iter().map(|&x| x > threshold).collect(),
    }
}

fn parse_triplet<T: std::str::FromStr + Copy>(
    field: &str,
    value: &str,
) -> Result<(T, T, T), VolumeError> {
    let parts: Vec<T> = value
        .split_whitespace()
        .map(|s| s.parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| VolumeError::MalformedHeaderField {
            field: field.to_string(),
            value: value.to_string(),
        })?;
    if parts.len() != 3 {
        return Err(VolumeError::MalformedHeaderField {
            field: field.to_string(),
            value: value.to_string(),
        });
    }
    Ok((parts[0], parts[1], parts[2]))
}

/// Read a MetaImage-style header + raw little-endian payload.
pub fn read_volume(path: &Path) -> Result<ScalarVolume, VolumeError> {
    let header = fs::read_to_string(path)?;
    let mut dims = None;
    let mut spacing = None;
    let mut origin = (0.0, 0.0, 0.0);
    let mut etype = None;
    let mut datafile = None;
    for line in header.lines() {
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "NDims" => {
                if value != "3" {
                    return Err(VolumeError::MalformedHeaderField {
                        field: "NDims".into(),
                        value: value.into(),
                    });
                }
            }
            "DimSize" => dims = Some(parse_triplet::<usize>("DimSize", value)?),
            "ElementSpacing" => spacing = Some(parse_triplet::<f64>("ElementSpacing", value)?),
            "Offset" => origin = parse_triplet::<f64>("Offset", value)?,
            "ElementType" => {
                etype = Some(match value {
                    "MET_SHORT" => ElementType::Short,
                    "MET_FLOAT" => ElementType::Float,
                    other => return Err(VolumeError::UnsupportedElementType(other.into())),
                })
            }
            "ElementByteOrderMSB" => {
                if value.eq_ignore_ascii_case("true") {
                    return Err(VolumeError::MalformedHeaderField {
                        field: "ElementByteOrderMSB".into(),
                        value: value.into(),
                    });
                }
            }
            "ElementDataFile" => datafile = Some(value.to_string()),
            _ => {}
        }
    }
    let dims = dims.ok_or_else(|| VolumeError::MissingHeaderField("DimSize".into()))?;
    let spacing = spacing.ok_or_else(|| VolumeError::MissingHeaderField("ElementSpacing".into()))?;
    let etype = etype.ok_or_else(|| VolumeError::MissingHeaderField("ElementType".into()))?;
    let datafile = datafile.ok_or_else(|| VolumeError::MissingHeaderField("ElementDataFile".into()))?;

    let raw_path = path.parent().unwrap_or(Path::new(".")).join(&datafile);
    let bytes = fs::read(&raw_path)?;
    let n = dims.0 * dims.1 * dims.2;
    let expected = n * etype.byte_size();
    if bytes.len() != expected {
        return Err(VolumeError::DimsMismatch {
            expected,
            actual: bytes.len(),
        });
    }
    let data: Vec<f64> = match etype {
        ElementType::Short => bytes
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64)
            .collect(),
        ElementType::Float => bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect(),
    };
    ScalarVolume::new(dims, spacing, origin, data)
}

/// Write as MET_FLOAT. See [`write_volume_typed`] to choose the element type.
pub fn write_volume(v: &ScalarVolume, path: &Path) -> Result<(), VolumeError> {
    write_volume_typed(v, path, ElementType::Float)
}

pub fn write_volume_typed(
    v: &ScalarVolume,
    path: &Path,
    etype: ElementType,
) -> Result<(), VolumeError> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| VolumeError::Invalid("path has no file stem".into()))?;
    let raw_name = format!("{stem}.raw");
    let header = format!(
        "NDims = 3\n\
         DimSize = {} {} {}\n\
         ElementSpacing = {} {} {}\n\
         Offset = {} {} {}\n\
         ElementType = {}\n\
         ElementByteOrderMSB = False\n\
         ElementDataFile = {}\n",
        v.dims.0,
        v.dims.1,
        v.dims.2,
        v.spacing.0,
        v.spacing.1,
        v.spacing.2,
        v.origin.0,
        v.origin.1,
        v.origin.2,
        etype.name(),
        raw_name
    );
    let mut raw = Vec::with_capacity(v.data.len() * etype.byte_size());
    match etype {
        ElementType::Short => {
            for &x in &v.data {
                raw.extend_from_slice(&(x as i16).to_le_bytes());
            }
        }
        ElementType::Float => {
            for &x in &v.data {
                raw.extend_from_slice(&(x as f32).to_le_bytes());
            }
        }
    }
    fs::write(path, header)?;
    let raw_path = path.parent().unwrap_or(Path::new(".")).join(raw_name);
    let mut f = fs::File::create(raw_path)?;
    f.write_all(&raw)?;
    Ok(())
}

/// Read a mask stored as a 0/1 volume.
pub fn read_mask(path: &Path) -> Result<BinaryMask, VolumeError> {
    Ok(binarize_mask(&read_volume(path)?, 0.5))
}

pub fn write_mask(m: &BinaryMask, path: &Path) -> Result<(), VolumeError> {
    write_volume_typed(&m.to_volume(), path, ElementType::Short)
}

fn output_dims(dims: (usize, usize, usize), spacing: (f64, f64, f64), target: f64) -> (usize, usize, usize) {
    let d = |n: usize, s: f64| ((n as f64 * s / target).ceil() as usize).max(1);
    (d(dims.0, spacing.0), d(dims.1, spacing.1), d(dims.2, spacing.2))
}

/// Trilinear resampling to an isotropic grid; samples outside the input
/// extent clamp to the nearest edge voxel.
pub fn resample_isotropic(v: &ScalarVolume, target: f64) -> Result<ScalarVolume, VolumeError> {
    if target <= 0.0 {
        return Err(VolumeError::NonPositiveTarget(target));
    }
    let (nx, ny, nz) = v.dims;
    let odims = output_dims(v.dims, v.spacing, target);
    let mut out = Vec::with_capacity(odims.0 * odims.1 * odims.2);
    for k in 0..odims.2 {
        let uz = (k as f64 * target / v.spacing.2).clamp(0.0, (nz - 1) as f64);
        let z0 = uz.floor() as usize;
        let z1 = (z0 + 1).min(nz - 1);
        let fz = uz - z0 as f64;
        for j in 0..odims.1 {
            let uy = (j as f64 * target / v.spacing.1).clamp(0.0, (ny - 1) as f64);
            let y0 = uy.floor() as usize;
            let y1 = (y0 + 1).min(ny - 1);
            let fy = uy - y0 as f64;
            for i in 0..odims.0 {
                let ux = (i as f64 * target / v.spacing.0).clamp(0.0, (nx - 1) as f64);
                let x0 = ux.floor() as usize;
                let x1 = (x0 + 1).min(nx - 1);
                let fx = ux - x0 as f64;
                let c000 = v.get(x0, y0, z0);
                let c100 = v.get(x1, y0, z0);
                let c010 = v.get(x0, y1, z0);
                let c110 = v.get(x1, y1, z0);
                let c001 = v.get(x0, y0, z1);
                let c101 = v.get(x1, y0, z1);
                let c011 = v.get(x0, y1, z1);
                let c111 = v.get(x1, y1, z1);
                let c00 = c000 + (c100 - c000) * fx;
                let c10 = c010 + (c110 - c010) * fx;
                let c01 = c001 + (c101 - c001) * fx;
                let c11 = c011 + (c111 - c011) * fx;
                let c0 = c00 + (c10 - c00) * fy;
                let c1 = c01 + (c11 - c01) * fy;
                out.push(c0 + (c1 - c0) * fz);
            }
        }
    }
    Ok(ScalarVolume {
        dims: odims,
        spacing: (target, target, target),
        origin: v.origin,
        data: out,
    })
}

/// Nearest-neighbor mask resampling onto the same grid as [`resample_isotropic`].
pub fn resample_mask_nearest(m: &BinaryMask, target: f64) -> Result<BinaryMask, VolumeError> {
    if target <= 0.0 {
        return Err(VolumeError::NonPositiveTarget(target));
    }
    let (nx, ny, nz) = m.dims;
    let odims = output_dims(m.dims, m.spacing, target);
    let mut out = Vec::with_capacity(odims.0 * odims.1 * odims.2);
    for k in 0..odims.2 {
        let z = ((k as f64 * target / m.spacing.2).round() as usize).min(nz - 1);
        for j in 0..odims.1 {
            let y = ((j as f64 * target / m.spacing.1).round() as usize).min(ny - 1);
            for i in 0..odims.0 {
                let x = ((i as f64 * target / m.spacing.0).round() as usize).min(nx - 1);
                out.push(m.get(x, y, z));
            }
        }
    }
    Ok(BinaryMask {
        dims: odims,
        spacing: (target, target, target),
        origin: m.origin,
        data: out,
    })
}
