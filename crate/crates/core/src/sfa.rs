//! Discrete SFA sampling: filter masks, mosaicing and sparse expansion.

use crate::cube::{MosaicImage, SpectralCube};
use crate::error::{Error, Result};
use crate::pattern::SfaPattern;

/// Positions at which one band is sampled: every `period` pixels starting
/// from (`offset_row`, `offset_col`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingLattice {
    pub band: usize,
    pub offset_row: usize,
    pub offset_col: usize,
    pub period: usize,
}

impl SamplingLattice {
    pub fn of(pattern: &SfaPattern, band: usize) -> Self {
        let (offset_row, offset_col) = pattern.cell_of(band);
        Self {
            band,
            offset_row,
            offset_col,
            period: pattern.period(),
        }
    }

    #[inline]
    pub fn contains(&self, u: usize, v: usize) -> bool {
        u % self.period == self.offset_row && v % self.period == self.offset_col
    }

    /// Number of lattice rows and columns that fall inside an h×w image.
    pub fn extent(&self, h: usize, w: usize) -> (usize, usize) {
        let count = |n: usize, off: usize| {
            if off >= n {
                0
            } else {
                (n - off).div_ceil(self.period)
            }
        };
        (count(h, self.offset_row), count(w, self.offset_col))
    }
}

/// Filter mask indicator for period cell (i, j) at pixel (u, v).
#[inline]
pub fn mask(pattern: &SfaPattern, i: usize, j: usize, u: usize, v: usize) -> bool {
    let n = pattern.period();
    u % n == i && v % n == j
}

#[inline]
pub fn band_at_pixel(pattern: &SfaPattern, u: usize, v: usize) -> usize {
    let n = pattern.period();
    pattern.band_at(u % n, v % n)
}

fn check_bands(cube: &SpectralCube, pattern: &SfaPattern) -> Result<()> {
    if cube.bands() != pattern.bands() {
        return Err(Error::Shape(format!(
            "cube has {} bands but a period-{} pattern samples {}",
            cube.bands(),
            pattern.period(),
            pattern.bands()
        )));
    }
    Ok(())
}

/// Samples one band per pixel according to the pattern.
pub fn mosaic(cube: &SpectralCube, pattern: &SfaPattern) -> Result<MosaicImage> {
    check_bands(cube, pattern)?;
    let (h, w, _) = cube.dims();
    MosaicImage::from_fn(h, w, |u, v| cube.get(u, v, band_at_pixel(pattern, u, v)))
}

/// Simulated SFA capture of a (pseudo) cube. Same contract as [`mosaic`].
pub fn remosaic(pseudo_cube: &SpectralCube, pattern: &SfaPattern) -> Result<MosaicImage> {
    mosaic(pseudo_cube, pattern)
}

/// Places each mosaic sample in its own band, zero elsewhere.
pub fn sparse_expand(mosaic: &MosaicImage, pattern: &SfaPattern) -> SpectralCube {
    let (h, w) = (mosaic.height(), mosaic.width());
    let mut cube = SpectralCube::zeros(h, w, pattern.bands()).expect("mosaic dims are positive");
    for u in 0..h {
        for v in 0..w {
            cube.set(u, v, band_at_pixel(pattern, u, v), mosaic.get(u, v));
        }
    }
    cube
}
