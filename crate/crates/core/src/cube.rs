//! Value types for spectral cubes and mosaic frames.
//!
//! Cubes are stored band-sequential: all of band 0 row-major, then band 1,
//! and so on. Per-band slices are therefore contiguous.

use std::fmt;

use crate::error::{Error, Result};

/// H×W×C array of intensities, band-sequential.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCube {
    height: usize,
    width: usize,
    bands: usize,
    data: Vec<f32>,
}

impl SpectralCube {
    pub fn new(height: usize, width: usize, bands: usize, data: Vec<f32>) -> Result<Self> {
        if height == 0 || width == 0 || bands == 0 {
            return Err(Error::Shape(format!(
                "cube dimensions must be positive, got {height}x{width}x{bands}"
            )));
        }
        let expected = height * width * bands;
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "cube {height}x{width}x{bands} needs {expected} samples, got {}",
                data.len()
            )));
        }
        Ok(Self {
            height,
            width,
            bands,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize, bands: usize) -> Result<Self> {
        Self::new(height, width, bands, vec![0.0; height * width * bands])
    }

    /// Builds a cube by evaluating `f(row, col, band)` at every sample.
    pub fn from_fn(
        height: usize,
        width: usize,
        bands: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * bands);
        for k in 0..bands {
            for u in 0..height {
                for v in 0..width {
                    data.push(f(u, v, k));
                }
            }
        }
        Self::new(height, width, bands, data)
    }

    /// Assembles a cube from equally sized band planes.
    pub fn from_bands(height: usize, width: usize, planes: Vec<Vec<f32>>) -> Result<Self> {
        let bands = planes.len();
        let mut data = Vec::with_capacity(height * width * bands);
        for (k, p) in planes.into_iter().enumerate() {
            if p.len() != height * width {
                return Err(Error::Shape(format!(
                    "band {k} has {} samples, expected {}",
                    p.len(),
                    height * width
                )));
            }
            data.extend(p);
        }
        Self::new(height, width, bands, data)
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn bands(&self) -> usize {
        self.bands
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.bands)
    }

    #[inline]
    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    fn offset(&self, row: usize, col: usize, band: usize) -> usize {
        debug_assert!(row < self.height && col < self.width && band < self.bands);
        band * self.plane_len() + row * self.width + col
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, band: usize) -> f32 {
        self.data[self.offset(row, col, band)]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, band: usize, value: f32) {
        let i = self.offset(row, col, band);
        self.data[i] = value;
    }

    pub fn band(&self, band: usize) -> &[f32] {
        let n = self.plane_len();
        &self.data[band * n..(band + 1) * n]
    }

    pub fn band_mut(&mut self, band: usize) -> &mut [f32] {
        let n = self.plane_len();
        &mut self.data[band * n..(band + 1) * n]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    /// Spectral vector of one pixel.
    pub fn pixel(&self, row: usize, col: usize) -> Vec<f32> {
        (0..self.bands).map(|k| self.get(row, col, k)).collect()
    }

    pub fn map(&self, f: impl Fn(f32) -> f32) -> Self {
        Self {
            data: self.data.iter().map(|&x| f(x)).collect(),
            ..*self
        }
    }

    pub fn same_dims(&self, other: &SpectralCube) -> bool {
        self.dims() == other.dims()
    }
}

/// Raw single-channel SFA frame, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MosaicImage {
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl MosaicImage {
    pub fn new(height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Shape(format!(
                "mosaic dimensions must be positive, got {height}x{width}"
            )));
        }
        if data.len() != height * width {
            return Err(Error::Shape(format!(
                "mosaic {height}x{width} needs {} samples, got {}",
                height * width,
                data.len()
            )));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width);
        for u in 0..height {
            for v in 0..width {
                data.push(f(u, v));
            }
        }
        Self::new(height, width, data)
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.data[row * self.width + col]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    /// Views the mosaic as a single-band cube (the on-disk representation).
    pub fn to_cube(&self) -> SpectralCube {
        SpectralCube::new(self.height, self.width, 1, self.data.clone())
            .expect("mosaic dims are valid cube dims")
    }

    pub fn from_cube(cube: SpectralCube) -> Result<Self> {
        if cube.bands() != 1 {
            return Err(Error::Shape(format!(
                "a mosaic has exactly one band, got {}",
                cube.bands()
            )));
        }
        let (h, w, _) = cube.dims();
        Self::new(h, w, cube.into_vec())
    }
}

/// Top-left corner and extent of a patch inside a parent image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PatchOrigin {
    pub row: usize,
    pub col: usize,
    pub size_h: usize,
    pub size_w: usize,
}

impl PatchOrigin {
    pub fn new(row: usize, col: usize, size_h: usize, size_w: usize) -> Self {
        Self {
            row,
            col,
            size_h,
            size_w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// NaN or infinity. Fatal.
    NonFinite,
    /// Finite but outside [0, 1]. Warning only.
    OutOfRange,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub row: usize,
    pub col: usize,
    pub band: usize,
    pub value: f32,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ViolationKind::NonFinite => "non-finite",
            ViolationKind::OutOfRange => "out of [0,1]",
        };
        write!(f, "{what} at ({},{},{})", self.row, self.col, self.band)
    }
}

/// Outcome of [`validate_cube`]. Only the first [`ValidationReport::MAX_LISTED`]
/// offenders of each kind are listed; the counts are exact.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub non_finite: usize,
    pub out_of_range: usize,
}

impl ValidationReport {
    pub const MAX_LISTED: usize = 10;

    pub fn is_empty(&self) -> bool {
        self.non_finite == 0 && self.out_of_range == 0
    }

    /// True when nothing fatal was found (out-of-range samples are tolerated).
    pub fn is_ok(&self) -> bool {
        self.non_finite == 0
    }
}

pub fn validate_cube(cube: &SpectralCube) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut listed_nf = 0;
    let mut listed_oor = 0;
    let (h, w, c) = cube.dims();
    for k in 0..c {
        let plane = cube.band(k);
        for u in 0..h {
            for v in 0..w {
                let x = plane[u * w + v];
                let kind = if !x.is_finite() {
                    report.non_finite += 1;
                    if listed_nf >= ValidationReport::MAX_LISTED {
                        continue;
                    }
                    listed_nf += 1;
                    ViolationKind::NonFinite
                } else if !(0.0..=1.0).contains(&x) {
                    report.out_of_range += 1;
                    if listed_oor >= ValidationReport::MAX_LISTED {
                        continue;
                    }
                    listed_oor += 1;
                    ViolationKind::OutOfRange
                } else {
                    continue;
                };
                report.violations.push(Violation {
                    kind,
                    row: u,
                    col: v,
                    band: k,
                    value: x,
                });
            }
        }
    }
    report
}
