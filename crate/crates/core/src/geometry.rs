//! Phase-aware cropping and the eight symmetries of the square.

use std::fmt;
use std::str::FromStr;

use crate::cube::{PatchOrigin, SpectralCube};
use crate::error::{Error, Result};

/// Copies a window out of `cube`. The origin must sit on a pattern period
/// boundary so the crop keeps the SFA phase of its parent.
pub fn crop_aligned(cube: &SpectralCube, origin: PatchOrigin, period: usize) -> Result<SpectralCube> {
    if period == 0 {
        return Err(Error::Param("period must be at least 1".into()));
    }
    if !origin.row.is_multiple_of(period) || !origin.col.is_multiple_of(period) {
        return Err(Error::Alignment(format!(
            "origin ({}, {}) is not a multiple of period {period}",
            origin.row, origin.col
        )));
    }
    if origin.size_h == 0 || origin.size_w == 0 {
        return Err(Error::Bounds("empty window".into()));
    }
    let (h, w, c) = cube.dims();
    if origin.row + origin.size_h > h || origin.col + origin.size_w > w {
        return Err(Error::Bounds(format!(
            "window {}x{} at ({}, {}) exceeds {h}x{w}",
            origin.size_h, origin.size_w, origin.row, origin.col
        )));
    }
    let mut data = Vec::with_capacity(origin.size_h * origin.size_w * c);
    for k in 0..c {
        let plane = cube.band(k);
        for u in origin.row..origin.row + origin.size_h {
            let start = u * w + origin.col;
            data.extend_from_slice(&plane[start..start + origin.size_w]);
        }
    }
    SpectralCube::new(origin.size_h, origin.size_w, c, data)
}

/// Element of the dihedral group D4 acting on the spatial axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum D4 {
    Identity,
    Rot90Cw,
    Rot180,
    Rot270Cw,
    FlipH,
    FlipV,
    Transpose,
    AntiTranspose,
}

impl D4 {
    /// Canonical augmentation order.
    pub const ALL: [D4; 8] = [
        D4::Identity,
        D4::Rot90Cw,
        D4::Rot180,
        D4::Rot270Cw,
        D4::FlipH,
        D4::FlipV,
        D4::Transpose,
        D4::AntiTranspose,
    ];

    /// The subset that keeps height and width in place.
    pub const SHAPE_PRESERVING: [D4; 4] = [D4::Identity, D4::Rot180, D4::FlipH, D4::FlipV];

    pub fn name(self) -> &'static str {
        match self {
            D4::Identity => "identity",
            D4::Rot90Cw => "rot90cw",
            D4::Rot180 => "rot180",
            D4::Rot270Cw => "rot270cw",
            D4::FlipH => "flip_h",
            D4::FlipV => "flip_v",
            D4::Transpose => "transpose",
            D4::AntiTranspose => "anti_transpose",
        }
    }

    pub fn inverse(self) -> D4 {
        match self {
            D4::Rot90Cw => D4::Rot270Cw,
            D4::Rot270Cw => D4::Rot90Cw,
            other => other,
        }
    }

    pub fn swaps_axes(self) -> bool {
        matches!(
            self,
            D4::Rot90Cw | D4::Rot270Cw | D4::Transpose | D4::AntiTranspose
        )
    }

    /// Source pixel for output pixel (u, v), given the *input* dims.
    #[inline]
    fn source(self, u: usize, v: usize, h: usize, w: usize) -> (usize, usize) {
        match self {
            D4::Identity => (u, v),
            D4::Rot90Cw => (h - 1 - v, u),
            D4::Rot180 => (h - 1 - u, w - 1 - v),
            D4::Rot270Cw => (v, w - 1 - u),
            D4::FlipH => (u, w - 1 - v),
            D4::FlipV => (h - 1 - u, v),
            D4::Transpose => (v, u),
            D4::AntiTranspose => (h - 1 - v, w - 1 - u),
        }
    }
}

impl fmt::Display for D4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for D4 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        D4::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::Param(format!("unknown transform '{s}'")))
    }
}

/// Applies `op` to every band. Axis-swapping ops exchange height and width.
pub fn transform_d4(cube: &SpectralCube, op: D4) -> SpectralCube {
    if op == D4::Identity {
        return cube.clone();
    }
    let (h, w, c) = cube.dims();
    let (oh, ow) = if op.swaps_axes() { (w, h) } else { (h, w) };
    let mut data = Vec::with_capacity(h * w * c);
    for k in 0..c {
        let plane = cube.band(k);
        for u in 0..oh {
            for v in 0..ow {
                let (su, sv) = op.source(u, v, h, w);
                data.push(plane[su * w + sv]);
            }
        }
    }
    SpectralCube::new(oh, ow, c, data).expect("transform preserves sample count")
}
