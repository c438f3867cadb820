//! Per-band bilinear demosaicing (weighted bilinear, "WB").
//!
//! Each band is reconstructed from its own sampling lattice only. Inside the
//! lattice hull a pixel is the bilinear blend of the four surrounding sites;
//! beyond the outermost lattice row or column the nearest site is replicated.
//! Weights are evaluated in f64 and rounded once when stored.

use rayon::prelude::*;

use crate::cube::{MosaicImage, SpectralCube};
use crate::error::{Error, Result};
use crate::pattern::SfaPattern;
use crate::sfa::SamplingLattice;

/// Demosaicer interface: anything that turns a mosaic into a full cube.
pub trait Demosaicer {
    fn demosaic(&self, mosaic: &MosaicImage, pattern: &SfaPattern) -> Result<SpectralCube>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WbBilinear;

impl Demosaicer for WbBilinear {
    fn demosaic(&self, mosaic: &MosaicImage, pattern: &SfaPattern) -> Result<SpectralCube> {
        wb_bilinear(mosaic, pattern)
    }
}

/// Interpolation taps along one axis: two lattice indices and the weight of the second.
#[derive(Clone, Copy)]
struct Taps {
    lo: usize,
    hi: usize,
    frac: f64,
}

fn axis_taps(n: usize, offset: usize, period: usize, sites: usize) -> Vec<Taps> {
    let last = sites - 1;
    (0..n)
        .map(|x| {
            if x <= offset {
                Taps { lo: 0, hi: 0, frac: 0.0 }
            } else {
                let rel = x - offset;
                let lo = rel / period;
                if lo >= last {
                    Taps { lo: last, hi: last, frac: 0.0 }
                } else {
                    Taps {
                        lo,
                        hi: lo + 1,
                        frac: (rel % period) as f64 / period as f64,
                    }
                }
            }
        })
        .collect()
}

fn interpolate_band(mosaic: &MosaicImage, lat: SamplingLattice) -> Vec<f32> {
    let (h, w) = (mosaic.height(), mosaic.width());
    let (rows, cols) = lat.extent(h, w);
    let p = lat.period;
    let site = |r: usize, c: usize| mosaic.get(lat.offset_row + r * p, lat.offset_col + c * p) as f64;
    let rt = axis_taps(h, lat.offset_row, p, rows);
    let ct = axis_taps(w, lat.offset_col, p, cols);
    let mut out = Vec::with_capacity(h * w);
    for ry in &rt {
        for cx in &ct {
            let top = (1.0 - cx.frac) * site(ry.lo, cx.lo) + cx.frac * site(ry.lo, cx.hi);
            let bottom = (1.0 - cx.frac) * site(ry.hi, cx.lo) + cx.frac * site(ry.hi, cx.hi);
            out.push(((1.0 - ry.frac) * top + ry.frac * bottom) as f32);
        }
    }
    out
}

/// Bilinear reconstruction of every band. The image must be at least one
/// period in each direction so that every band has a sample.
pub fn wb_bilinear(mosaic: &MosaicImage, pattern: &SfaPattern) -> Result<SpectralCube> {
    let (h, w) = (mosaic.height(), mosaic.width());
    let n = pattern.period();
    if h < n || w < n {
        return Err(Error::Shape(format!(
            "{h}x{w} mosaic is smaller than one {n}x{n} pattern period; some bands are unsampled"
        )));
    }
    let planes: Vec<Vec<f32>> = (0..pattern.bands())
        .into_par_iter()
        .map(|k| interpolate_band(mosaic, SamplingLattice::of(pattern, k)))
        .collect();
    SpectralCube::from_bands(h, w, planes)
}
