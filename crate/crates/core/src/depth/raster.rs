//! Depth rasters, their intensity-image derivatives, and the DM01 binary
//! file format.
//!
//! DM01 layout: 4-byte ASCII magic `DM01`, u32 LE width, u32 LE height,
//! then width*height IEEE-754 f32 LE values, row-major, meters.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"DM01";

/// A depth raster. Values are meters for a metric map; the same container
/// holds inverse maps (1/meters) and foreground-subtracted salience maps.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl DepthMap {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "depth raster shape mismatch");
        Self {
            width,
            height,
            data,
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::new(width, height, vec![value; width * height])
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    pub fn same_shape(&self, other: &DepthMap) -> bool {
        self.width == other.width && self.height == other.height
    }

    fn shape_string(&self) -> String {
        format!("{}x{}", self.width, self.height)
    }
}

/// Read a DM01 depth raster. Metric maps must hold finite, positive values.
pub fn load_depth_map(path: &Path) -> Result<DepthMap> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut r = BufReader::new(file);
    let bad = |reason: &str| Error::DepthFormat {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
    if &magic != MAGIC {
        return Err(bad(&format!(
            "bad magic {:?}, expected \"DM01\"",
            String::from_utf8_lossy(&magic)
        )));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf).map_err(|_| bad("truncated header"))?;
    let width = u32::from_le_bytes(u32buf) as usize;
    r.read_exact(&mut u32buf).map_err(|_| bad("truncated header"))?;
    let height = u32::from_le_bytes(u32buf) as usize;
    if width == 0 || height == 0 {
        return Err(bad("zero dimension"));
    }

    let count = width
        .checked_mul(height)
        .ok_or_else(|| bad("dimension overflow"))?;
    let mut payload = vec![0u8; count * 4];
    r.read_exact(&mut payload)
        .map_err(|_| bad("payload shorter than width*height floats"))?;
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })? != 0
    {
        return Err(bad("trailing bytes after payload"));
    }

    let mut data = Vec::with_capacity(count);
    for (i, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]) as f64;
        if !v.is_finite() || v <= 0.0 {
            return Err(bad(&format!("non-finite or non-positive value {v} at index {i}")));
        }
        data.push(v);
    }
    Ok(DepthMap::new(width, height, data))
}

/// Write a raster in DM01 format (values stored as f32).
pub fn save_depth_map(map: &DepthMap, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&(map.width as u32).to_le_bytes()).map_err(io_err)?;
    w.write_all(&(map.height as u32).to_le_bytes()).map_err(io_err)?;
    for &v in &map.data {
        w.write_all(&(v as f32).to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Pointwise inverse: 1 / max(value, epsilon). Epsilon guards degenerate
/// zero depths.
pub fn invert(map: &DepthMap, epsilon: f64) -> DepthMap {
    DepthMap {
        width: map.width,
        height: map.height,
        data: map.data.iter().map(|&v| 1.0 / v.max(epsilon)).collect(),
    }
}

/// Pointwise mean of already-inverted maps.
pub fn mean_inverse_map(maps: &[DepthMap]) -> Result<DepthMap> {
    let first = maps.first().ok_or(Error::EmptyInput("mean_inverse_map"))?;
    let mut acc = vec![0.0f64; first.data.len()];
    for m in maps {
        if !m.same_shape(first) {
            return Err(Error::DimensionMismatch {
                expected: first.shape_string(),
                actual: m.shape_string(),
            });
        }
        for (a, v) in acc.iter_mut().zip(&m.data) {
            *a += v;
        }
    }
    let k = maps.len() as f64;
    for a in &mut acc {
        *a /= k;
    }
    Ok(DepthMap::new(first.width, first.height, acc))
}

/// Pointwise max(0, inv - mean): removes the static driving-perspective
/// foreground, keeping the raster a non-negative salience map.
pub fn subtract_foreground(inv: &DepthMap, mean: &DepthMap) -> Result<DepthMap> {
    if !inv.same_shape(mean) {
        return Err(Error::DimensionMismatch {
            expected: inv.shape_string(),
            actual: mean.shape_string(),
        });
    }
    let data = inv
        .data
        .iter()
        .zip(&mean.data)
        .map(|(a, b)| (a - b).max(0.0))
        .collect();
    Ok(DepthMap {
        width: inv.width,
        height: inv.height,
        data,
    })
}

/// Real-valued intensity raster on [0, 255].
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl IntensityImage {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }
}

/// Linear normalization to [0, 255]: min maps to 0, max to 255. A constant
/// raster normalizes to all zeros.
pub fn normalize(map: &DepthMap) -> IntensityImage {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in &map.data {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let range = hi - lo;
    let data = if range <= 0.0 {
        vec![0.0; map.data.len()]
    } else {
        map.data
            .iter()
            .map(|&v| (v - lo) / range * 255.0)
            .collect()
    };
    IntensityImage {
        width: map.width,
        height: map.height,
        data,
    }
}

/// Boolean edge raster produced by edge detection.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMask {
    pub width: usize,
    pub height: usize,
    pub data: Vec<bool>,
}

impl EdgeMask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize) {
        self.data[y * self.width + x] = true;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}
